use std::fmt;

use num_traits::Signed;

use super::basify::{ground_base, lower_constraint};
use super::raw::{LinError, Op, RawAtom, RawClause, RawConstraint, RawProblem, RawTerm};
use crate::syntax::{Rel, Sort};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FragmentClass {
    /// Constraints are simple bounds already.
    BsrSimpleBounds,
    /// Constraints and terms lower to simple bounds by basification.
    BsrGroundLA,
    OutOfFragment { reason: String, offending: String },
}

impl fmt::Display for FragmentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FragmentClass::BsrSimpleBounds => write!(f, "bsr-simple-bounds"),
            FragmentClass::BsrGroundLA => write!(f, "bsr-ground-la"),
            FragmentClass::OutOfFragment { reason, offending } => {
                write!(f, "out-of-fragment ({}: {})", reason, offending)
            }
        }
    }
}

fn atomic(problem: &RawProblem, clause: &RawClause, t: &RawTerm) -> Option<Kind> {
    match t {
        RawTerm::Sym(s) if clause.var_sorts.contains_key(s) => Some(Kind::Var),
        RawTerm::Num(_) | RawTerm::Sym(_) => Some(Kind::Plain),
        RawTerm::Minf => Some(Kind::Alpha),
        RawTerm::Eps(inner) => match ground_base(problem, inner) {
            Ok(c) if c.is_plain_base() && matches!(**inner, RawTerm::Num(_) | RawTerm::Sym(_)) => {
                Some(Kind::Alpha)
            }
            _ => None,
        },
        RawTerm::App(..) => None,
    }
}

#[derive(PartialEq)]
enum Kind {
    Var,
    Plain,
    Alpha,
}

fn is_simple(problem: &RawProblem, clause: &RawClause, c: &RawConstraint) -> bool {
    let (Some(l), Some(r)) = (atomic(problem, clause, &c.lhs), atomic(problem, clause, &c.rhs)) else {
        return false;
    };
    match (l, r) {
        (Kind::Var, Kind::Var) => false,
        (Kind::Var, Kind::Alpha) | (Kind::Alpha, Kind::Var) => c.rel == Rel::Eq,
        _ => lower_constraint(problem, clause, c).is_ok(),
    }
}

fn classify(clause: &RawClause, c: &RawConstraint, fallback: String) -> String {
    let diff = RawTerm::app(Op::Sub, vec![c.lhs.clone(), c.rhs.clone()]);
    let is_var = |s: &str| clause.var_sorts.contains_key(s);
    match diff.linearize(&is_var) {
        Ok(form) if form.coeffs.len() == 2 => {
            let mut it = form.coeffs.values();
            let (a, b) = (it.next().unwrap(), it.next().unwrap());
            if *a == -b {
                "two-variable difference constraint".into()
            } else if a == b {
                "two-variable additive constraint".into()
            } else if a.is_positive() != b.is_positive() {
                "two-variable quotient constraint".into()
            } else {
                "two-variable linear constraint".into()
            }
        }
        Ok(form) if form.coeffs.len() > 2 => "multivariate linear constraint".into(),
        Err(LinError::Product(vars)) if vars.len() == 2 => "two-variable multiplicative constraint".into(),
        Err(LinError::Product(_)) => "nonlinear constraint".into(),
        _ => fallback,
    }
}

fn check_atom(problem: &RawProblem, clause: &RawClause, a: &RawAtom) -> Result<bool, (String, String)> {
    let mut simple = true;
    let mut terms: Vec<(&RawTerm, Sort)> = Vec::new();
    match a {
        RawAtom::Eq(l, r) => terms.extend([(l, Sort::Free), (r, Sort::Free)]),
        RawAtom::Pred { symbol, args } => terms.extend(args.iter().zip(problem.predicates[symbol].iter().copied())),
    }
    for (t, sort) in terms {
        let ok = match (t, sort) {
            (RawTerm::Sym(_), _) => true,
            (RawTerm::App(Op::Fun(_), _), Sort::Free) => {
                simple = false;
                let mut syms = Vec::new();
                t.symbols(&mut syms);
                !syms.iter().any(|s| clause.var_sorts.contains_key(s))
            }
            (_, Sort::Base) => {
                simple &= atomic(problem, clause, t).is_some();
                ground_base(problem, t).is_ok()
            }
            _ => false,
        };
        if !ok {
            return Err(("non-ground or ill-sorted term".into(), a.to_string()));
        }
    }
    Ok(simple)
}

/// Classifies a parsed problem by the shape of its constraints and terms.
pub fn check_fragment(problem: &RawProblem) -> FragmentClass {
    let mut simple = true;
    for clause in &problem.clauses {
        for c in &clause.constraints {
            if is_simple(problem, clause, c) {
                continue;
            }
            match lower_constraint(problem, clause, c) {
                Ok(_) => simple = false,
                Err(e) => {
                    return FragmentClass::OutOfFragment {
                        reason: classify(clause, c, e.to_string()),
                        offending: c.to_string(),
                    }
                }
            }
        }
        for a in clause.atoms() {
            match check_atom(problem, clause, a) {
                Ok(s) => simple &= s,
                Err((reason, offending)) => return FragmentClass::OutOfFragment { reason, offending },
            }
        }
    }
    if simple {
        FragmentClass::BsrSimpleBounds
    } else {
        FragmentClass::BsrGroundLA
    }
}
