use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use super::purify::purify;
use super::raw::{LinError, Op, RawAtom, RawClause, RawConstraint, RawProblem, RawTerm};
use super::{BasifyError, BasifyErrorKind};
use crate::syntax::{
    AtomicConstraint, Clause, ClauseSet, ConstSym, FreeAtom, Rational, Rel, Signature, Sort, Term, Var,
};

type Kind = BasifyErrorKind;

fn is_var(clause: &RawClause, s: &str) -> bool {
    clause.var_sorts.contains_key(s)
}

fn contains_var(clause: &RawClause, t: &RawTerm) -> bool {
    let mut syms = Vec::new();
    t.symbols(&mut syms);
    syms.iter().any(|s| is_var(clause, s))
}

/// Lowers a ground base-sort term to a single constant symbol.
pub(crate) fn ground_base(problem: &RawProblem, t: &RawTerm) -> Result<ConstSym, Kind> {
    match t {
        RawTerm::Num(q) => Ok(ConstSym::Numeric(q.clone())),
        RawTerm::Minf => Ok(ConstSym::AlphaMinf),
        RawTerm::Sym(s) => match problem.constants.get(s) {
            Some(Sort::Base) => Ok(ConstSym::Skolem(s.clone())),
            Some(Sort::Free) => Err(Kind::SortMismatch(s.clone())),
            None => Err(Kind::NonGround(s.clone())),
        },
        RawTerm::Eps(inner) => match ground_base(problem, inner)? {
            c @ (ConstSym::Numeric(_) | ConstSym::Skolem(_)) => Ok(ConstSym::eps(c)),
            _ => Err(Kind::NestedAlpha(t.to_string())),
        },
        RawTerm::App(Op::Fun(f), _) => Err(Kind::FunctionInArithmetic(f.clone())),
        RawTerm::App(..) => match t.linearize(&|_| false) {
            Ok(form) => Ok(ConstSym::Numeric(form.constant)),
            Err(e) => Err(lin_error(problem, e, t)),
        },
    }
}

fn lin_error(problem: &RawProblem, e: LinError, t: &RawTerm) -> Kind {
    match e {
        LinError::Product(_) | LinError::VarDivisor => Kind::Nonlinear(t.to_string()),
        LinError::DivisionByZero => Kind::DivisionByZero(t.to_string()),
        LinError::NonNumeric(s) if problem.constants.get(&s) == Some(&Sort::Base) => {
            Kind::SkolemInArithmetic(s)
        }
        LinError::NonNumeric(s) => Kind::NonNumeric(s),
        LinError::Function(f) => Kind::FunctionInArithmetic(f),
    }
}

fn simple_bound(x: &str, rel: Rel, d: ConstSym, c: &RawConstraint) -> Result<AtomicConstraint, Kind> {
    if d.is_alpha() && rel != Rel::Eq {
        return Err(Kind::AlphaBound(c.to_string()));
    }
    Ok(AtomicConstraint::new(Var::base(x), rel, d))
}

/// Lowers one constraint to an atomic constraint, solving univariate linear
/// constraints for their variable.
pub(crate) fn lower_constraint(
    problem: &RawProblem,
    clause: &RawClause,
    c: &RawConstraint,
) -> Result<AtomicConstraint, Kind> {
    let mut syms = Vec::new();
    c.lhs.symbols(&mut syms);
    c.rhs.symbols(&mut syms);
    syms.retain(|s| is_var(clause, s));
    let distinct: BTreeSet<&String> = syms.iter().collect();
    if distinct.len() > 1 {
        return Err(Kind::MultipleVariables(c.to_string()));
    }
    if syms.len() > 1 {
        return Err(Kind::Nonlinear(c.to_string()));
    }
    let Some(x) = syms.first() else {
        let l = ground_base(problem, &c.lhs)?;
        let r = ground_base(problem, &c.rhs)?;
        return Ok(AtomicConstraint::new(l, c.rel, r).oriented());
    };
    match (&c.lhs, &c.rhs) {
        (RawTerm::Sym(s), rhs) if s == x => return simple_bound(x, c.rel, ground_base(problem, rhs)?, c),
        (lhs, RawTerm::Sym(s)) if s == x => {
            return simple_bound(x, c.rel.flip(), ground_base(problem, lhs)?, c)
        }
        _ => {}
    }
    let diff = RawTerm::app(Op::Sub, vec![c.lhs.clone(), c.rhs.clone()]);
    let form = diff.linearize(&|s| s == x.as_str()).map_err(|e| lin_error(problem, e, &diff))?;
    let Some(a) = form.coeffs.get(x.as_str()) else {
        let zero = ConstSym::Numeric(Rational::zero());
        return Ok(AtomicConstraint::new(ConstSym::Numeric(form.constant), c.rel, zero));
    };
    let bound = -&form.constant / a;
    let rel = if a.is_negative() { c.rel.flip() } else { c.rel };
    Ok(AtomicConstraint::new(Var::base(x), rel, ConstSym::Numeric(bound)))
}

struct Basifier<'a> {
    problem: &'a RawProblem,
    reserved: BTreeSet<String>,
    next: usize,
    table: BTreeMap<(String, Vec<ConstSym>), ConstSym>,
    order: Vec<(String, Vec<ConstSym>, ConstSym)>,
}

impl Basifier<'_> {
    fn fresh(&mut self) -> String {
        loop {
            let name = format!("b{}", self.next);
            self.next += 1;
            if !self.reserved.contains(&name) {
                return name;
            }
        }
    }

    fn function(&mut self, clause: &RawClause, f: &str, args: &[RawTerm]) -> Result<ConstSym, Kind> {
        let mut lowered = Vec::with_capacity(args.len());
        for a in args {
            if contains_var(clause, a) {
                return Err(Kind::NonGroundFunction(
                    RawTerm::App(Op::Fun(f.to_string()), args.to_vec()).to_string(),
                ));
            }
            let free = match a {
                RawTerm::Sym(s) => self.problem.constants.get(s) == Some(&Sort::Free),
                RawTerm::App(Op::Fun(_), _) => true,
                _ => false,
            };
            lowered.push(if free { self.free_ground(clause, a)? } else { ground_base(self.problem, a)? });
        }
        let key = (f.to_string(), lowered);
        if let Some(b) = self.table.get(&key) {
            return Ok(b.clone());
        }
        let b = ConstSym::Free(self.fresh());
        self.table.insert(key.clone(), b.clone());
        self.order.push((key.0, key.1, b.clone()));
        Ok(b)
    }

    fn free_ground(&mut self, clause: &RawClause, t: &RawTerm) -> Result<ConstSym, Kind> {
        match t {
            RawTerm::Sym(s) if self.problem.constants.get(s) == Some(&Sort::Free) => Ok(ConstSym::free(s)),
            RawTerm::App(Op::Fun(f), args) => self.function(clause, f, args),
            _ => Err(Kind::SortMismatch(t.to_string())),
        }
    }

    fn free_term(&mut self, clause: &RawClause, t: &RawTerm) -> Result<Term, Kind> {
        match t {
            RawTerm::Sym(s) if is_var(clause, s) => Ok(Var::free(s).into()),
            _ => Ok(self.free_ground(clause, t)?.into()),
        }
    }

    fn atom(&mut self, clause: &RawClause, a: &RawAtom) -> Result<FreeAtom, Kind> {
        match a {
            RawAtom::Eq(l, r) => Ok(FreeAtom::Eq(self.free_term(clause, l)?, self.free_term(clause, r)?)),
            RawAtom::Pred { symbol, args } => {
                let sorts = &self.problem.predicates[symbol];
                let mut out = Vec::with_capacity(args.len());
                for (t, s) in args.iter().zip(sorts) {
                    out.push(match s {
                        Sort::Free => self.free_term(clause, t)?,
                        Sort::Base => match t {
                            RawTerm::Sym(x) if is_var(clause, x) => Var::base(x).into(),
                            t if contains_var(clause, t) => {
                                return Err(Kind::NonGroundArgument(t.to_string()))
                            }
                            t => ground_base(self.problem, t)?.into(),
                        },
                    });
                }
                Ok(FreeAtom::pred(symbol, out))
            }
        }
    }

    fn clause(&mut self, c: &RawClause) -> Result<Clause, BasifyError> {
        let err = |kind| BasifyError { line: c.line, kind };
        let constraints = c
            .constraints
            .iter()
            .map(|k| lower_constraint(self.problem, c, k))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let antecedent = c.antecedent.iter().map(|a| self.atom(c, a)).collect::<Result<_, _>>().map_err(err)?;
        let succedent = c.succedent.iter().map(|a| self.atom(c, a)).collect::<Result<_, _>>().map_err(err)?;
        Ok(Clause::new(constraints, antecedent, succedent))
    }

    /// Functionality clauses for every pair of flattened terms with one head.
    fn ackermann(&self) -> Vec<Clause> {
        let mut out = Vec::new();
        for (i, (f, s, bs)) in self.order.iter().enumerate() {
            for (g, t, bt) in &self.order[i + 1..] {
                if f != g || s.len() != t.len() || s.iter().zip(t).any(|(a, b)| a.sort() != b.sort()) {
                    continue;
                }
                let mut c = Clause::default();
                for (a, b) in s.iter().zip(t) {
                    match a.sort() {
                        Sort::Base => c.constraints.push(AtomicConstraint::new(a.clone(), Rel::Eq, b.clone()).oriented()),
                        Sort::Free => c.antecedent.push(FreeAtom::Eq(a.clone().into(), b.clone().into())),
                    }
                }
                c.succedent.push(FreeAtom::Eq(bs.clone().into(), bt.clone().into()));
                out.push(c);
            }
        }
        out
    }
}

/// Flattens arithmetic and ground function terms, solves univariate linear
/// constraints and purifies the result.
pub fn basify(problem: &RawProblem) -> Result<ClauseSet, BasifyError> {
    let mut b = Basifier {
        problem,
        reserved: problem.identifiers(),
        next: 0,
        table: BTreeMap::new(),
        order: Vec::new(),
    };
    let mut clauses = problem.clauses.iter().map(|c| b.clause(c)).collect::<Result<Vec<_>, _>>()?;
    clauses.extend(b.ackermann());
    let mut sig = Signature::default();
    for (p, sorts) in &problem.predicates {
        sig.declare_predicate(p, sorts.clone());
    }
    for (name, sort) in &problem.constants {
        sig.declare_constant(match sort {
            Sort::Base => ConstSym::skolem(name),
            Sort::Free => ConstSym::free(name),
        });
    }
    for (_, _, c) in &b.order {
        sig.declare_constant(c.clone());
    }
    Ok(purify(&ClauseSet::new(sig, clauses)))
}
