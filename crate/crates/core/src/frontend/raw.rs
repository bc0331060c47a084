//! Pre-basification syntax: arithmetic and function terms as written.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::syntax::{Rational, Rel, Sort};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    /// An uninterpreted function of the free sort.
    Fun(String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RawTerm {
    Num(Rational),
    Sym(String),
    Minf,
    Eps(Box<RawTerm>),
    App(Op, Vec<RawTerm>),
}

impl RawTerm {
    pub fn app(op: Op, args: Vec<RawTerm>) -> RawTerm {
        RawTerm::App(op, args)
    }

    /// Every identifier occurring in the term, function heads excluded.
    pub fn symbols(&self, out: &mut Vec<String>) {
        match self {
            RawTerm::Sym(s) => out.push(s.clone()),
            RawTerm::Eps(t) => t.symbols(out),
            RawTerm::App(_, args) => args.iter().for_each(|a| a.symbols(out)),
            RawTerm::Num(_) | RawTerm::Minf => {}
        }
    }

    /// Evaluates an arithmetic term; `None` on unknown symbols, `α`
    /// constants, function applications or division by zero.
    pub fn eval(&self, env: &dyn Fn(&str) -> Option<Rational>) -> Option<Rational> {
        match self {
            RawTerm::Num(q) => Some(q.clone()),
            RawTerm::Sym(s) => env(s),
            RawTerm::Minf | RawTerm::Eps(_) => None,
            RawTerm::App(op, args) => {
                let vals = args.iter().map(|a| a.eval(env)).collect::<Option<Vec<_>>>()?;
                match (op, vals.as_slice()) {
                    (Op::Add, [a, b]) => Some(a + b),
                    (Op::Sub, [a, b]) => Some(a - b),
                    (Op::Mul, [a, b]) => Some(a * b),
                    (Op::Div, [_, b]) if b.is_zero() => None,
                    (Op::Div, [a, b]) => Some(a / b),
                    (Op::Neg, [a]) => Some(-a),
                    _ => None,
                }
            }
        }
    }

    /// Views the term as `Σ aᵢ·xᵢ + b` over the symbols accepted by `is_var`.
    pub fn linearize(&self, is_var: &dyn Fn(&str) -> bool) -> Result<LinForm, LinError> {
        match self {
            RawTerm::Num(q) => Ok(LinForm::constant(q.clone())),
            RawTerm::Sym(s) if is_var(s) => Ok(LinForm::var(s)),
            RawTerm::Sym(s) => Err(LinError::NonNumeric(s.clone())),
            RawTerm::Minf => Err(LinError::NonNumeric("@minf".into())),
            RawTerm::Eps(_) => Err(LinError::NonNumeric(self.to_string())),
            RawTerm::App(Op::Fun(f), _) => Err(LinError::Function(f.clone())),
            RawTerm::App(op, args) => {
                let mut forms = Vec::with_capacity(args.len());
                for a in args {
                    forms.push(a.linearize(is_var)?);
                }
                match (op, forms.as_mut_slice()) {
                    (Op::Neg, [a]) => Ok(a.scale(&-Rational::one())),
                    (Op::Add, [a, b]) => Ok(a.add(b)),
                    (Op::Sub, [a, b]) => Ok(a.add(&b.scale(&-Rational::one()))),
                    (Op::Mul, [a, b]) => match (a.is_constant(), b.is_constant()) {
                        (true, _) => Ok(b.scale(&a.constant)),
                        (_, true) => Ok(a.scale(&b.constant)),
                        _ => {
                            let vars = a.coeffs.keys().chain(b.coeffs.keys()).cloned().collect();
                            Err(LinError::Product(vars))
                        }
                    },
                    (Op::Div, [a, b]) => {
                        if !b.is_constant() {
                            Err(LinError::VarDivisor)
                        } else if b.constant.is_zero() {
                            Err(LinError::DivisionByZero)
                        } else {
                            Ok(a.scale(&(Rational::one() / &b.constant)))
                        }
                    }
                    _ => Err(LinError::NonNumeric(self.to_string())),
                }
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            RawTerm::App(Op::Add | Op::Sub, _) => 1,
            RawTerm::App(Op::Mul | Op::Div, _) => 2,
            RawTerm::App(Op::Neg, _) => 3,
            RawTerm::Num(q) if q < &Rational::zero() => 3,
            _ => 4,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, t: &RawTerm, min: u8) -> fmt::Result {
    if t.precedence() < min {
        write!(f, "({})", t)
    } else {
        write!(f, "{}", t)
    }
}

impl fmt::Display for RawTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RawTerm::Num(q) => write!(f, "{}", q),
            RawTerm::Sym(s) => f.write_str(s),
            RawTerm::Minf => f.write_str("@minf"),
            RawTerm::Eps(t) => write!(f, "@eps({})", t),
            RawTerm::App(Op::Fun(g), args) => {
                write!(f, "{}(", g)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", a)?;
                }
                write!(f, ")")
            }
            RawTerm::App(Op::Neg, args) => {
                write!(f, "-")?;
                write_operand(f, &args[0], 4)
            }
            RawTerm::App(op, args) => {
                let (sym, p) = match op {
                    Op::Add => ("+", 1),
                    Op::Sub => ("-", 1),
                    Op::Mul => ("*", 2),
                    _ => ("/", 2),
                };
                write_operand(f, &args[0], p)?;
                write!(f, " {} ", sym)?;
                write_operand(f, &args[1], p + 1)
            }
        }
    }
}

/// A linear form `Σ coeffs[x]·x + constant`; zero coefficients are dropped.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinForm {
    pub coeffs: BTreeMap<String, Rational>,
    pub constant: Rational,
}

impl LinForm {
    pub fn constant(q: Rational) -> LinForm {
        LinForm { coeffs: BTreeMap::new(), constant: q }
    }

    pub fn var(name: &str) -> LinForm {
        LinForm { coeffs: [(name.to_string(), Rational::one())].into(), constant: Rational::zero() }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, k: &Rational) -> LinForm {
        if k.is_zero() {
            return LinForm::constant(Rational::zero());
        }
        LinForm {
            coeffs: self.coeffs.iter().map(|(x, a)| (x.clone(), a * k)).collect(),
            constant: &self.constant * k,
        }
    }

    pub fn add(&self, other: &LinForm) -> LinForm {
        let mut coeffs = self.coeffs.clone();
        for (x, a) in &other.coeffs {
            let e = coeffs.entry(x.clone()).or_insert_with(Rational::zero);
            *e += a;
        }
        coeffs.retain(|_, a| !a.is_zero());
        LinForm { coeffs, constant: &self.constant + &other.constant }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinError {
    Product(BTreeSet<String>),
    VarDivisor,
    DivisionByZero,
    NonNumeric(String),
    Function(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawConstraint {
    pub lhs: RawTerm,
    pub rel: Rel,
    pub rhs: RawTerm,
}

impl fmt::Display for RawConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.rel, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawAtom {
    Pred { symbol: String, args: Vec<RawTerm> },
    Eq(RawTerm, RawTerm),
}

impl fmt::Display for RawAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RawAtom::Eq(l, r) => write!(f, "{} ~ {}", l, r),
            RawAtom::Pred { symbol, args } => {
                write!(f, "{}", RawTerm::App(Op::Fun(symbol.clone()), args.clone()))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawClause {
    pub line: usize,
    pub constraints: Vec<RawConstraint>,
    pub antecedent: Vec<RawAtom>,
    pub succedent: Vec<RawAtom>,
    /// Inferred sort of every variable of the clause.
    pub var_sorts: BTreeMap<String, Sort>,
}

impl RawClause {
    pub fn atoms(&self) -> impl Iterator<Item = &RawAtom> {
        self.antecedent.iter().chain(self.succedent.iter())
    }
}

/// A parsed, sort-checked problem whose terms are not yet flattened.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RawProblem {
    pub predicates: BTreeMap<String, Vec<Sort>>,
    pub constants: BTreeMap<String, Sort>,
    pub clauses: Vec<RawClause>,
}

impl RawProblem {
    /// Every identifier used anywhere, for choosing fresh names.
    pub fn identifiers(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> =
            self.predicates.keys().chain(self.constants.keys()).cloned().collect();
        for c in &self.clauses {
            out.extend(c.var_sorts.keys().cloned());
            let mut syms = Vec::new();
            for k in &c.constraints {
                k.lhs.symbols(&mut syms);
                k.rhs.symbols(&mut syms);
            }
            for a in c.atoms() {
                match a {
                    RawAtom::Pred { args, .. } => args.iter().for_each(|t| collect_heads(t, &mut syms)),
                    RawAtom::Eq(l, r) => {
                        collect_heads(l, &mut syms);
                        collect_heads(r, &mut syms);
                    }
                }
            }
            out.extend(syms);
        }
        out
    }
}

fn collect_heads(t: &RawTerm, out: &mut Vec<String>) {
    t.symbols(out);
    if let RawTerm::App(op, args) = t {
        if let Op::Fun(f) = op {
            out.push(f.clone());
        }
        args.iter().for_each(|a| collect_heads(a, out));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{rat, ratio};

    fn x() -> RawTerm {
        RawTerm::Sym("x".into())
    }

    fn num(n: i64) -> RawTerm {
        RawTerm::Num(rat(n))
    }

    #[test]
    fn linear_forms() {
        // 3*x + 2 - x/2
        let t = RawTerm::app(
            Op::Sub,
            vec![
                RawTerm::app(Op::Add, vec![RawTerm::app(Op::Mul, vec![num(3), x()]), num(2)]),
                RawTerm::app(Op::Div, vec![x(), num(2)]),
            ],
        );
        let f = t.linearize(&|s| s == "x").unwrap();
        assert_eq!(f.coeffs["x"], ratio(5, 2));
        assert_eq!(f.constant, rat(2));
    }

    #[test]
    fn products_of_variables_are_rejected() {
        let t = RawTerm::app(Op::Mul, vec![x(), RawTerm::Sym("y".into())]);
        assert!(matches!(t.linearize(&|_| true), Err(LinError::Product(v)) if v.len() == 2));
        let t = RawTerm::app(Op::Div, vec![num(1), num(0)]);
        assert_eq!(t.linearize(&|_| true), Err(LinError::DivisionByZero));
    }

    #[test]
    fn display_parenthesizes() {
        let t = RawTerm::app(Op::Mul, vec![RawTerm::app(Op::Add, vec![x(), num(1)]), num(2)]);
        assert_eq!(t.to_string(), "(x + 1) * 2");
        let t = RawTerm::app(Op::Sub, vec![x(), RawTerm::app(Op::Sub, vec![x(), num(1)])]);
        assert_eq!(t.to_string(), "x - (x - 1)");
    }

    #[test]
    fn evaluation() {
        let t = RawTerm::app(Op::Div, vec![num(1), RawTerm::app(Op::Neg, vec![num(3)])]);
        assert_eq!(t.eval(&|_| None), Some(ratio(-1, 3)));
        assert_eq!(RawTerm::app(Op::Div, vec![num(1), num(0)]).eval(&|_| None), None);
    }
}
