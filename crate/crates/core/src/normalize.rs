//! Normal form: eliminate base variables that occur only in the constraint
//! part, then rename clauses apart.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{
    dedup_variants, normal_form_diagnostics, rename_apart, simplify_clauses, AtomicConstraint, Clause,
    ClauseSet, ConstSym, Diagnostic, Rel, Sort, Term, Var,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("constraint `{constraint}` on {var} must be a strict or non-strict bound")]
    NotABound { var: String, constraint: String },
    #[error("inadmissible constraint `{0}`")]
    Shape(String),
}

fn bound_of<'a>(c: &'a AtomicConstraint, x: &Var) -> Option<(Rel, &'a ConstSym)> {
    match (&c.lhs, &c.rhs) {
        (Term::Var(v), Term::Const(d)) if v == x => Some((c.rel, d)),
        _ => None,
    }
}

/// Eliminates `x` from `lambda` by pairing every lower with every upper bound.
pub fn fm_eliminate(lambda: &[AtomicConstraint], x: &Var) -> Result<Vec<AtomicConstraint>, NormalizeError> {
    let mut others = Vec::new();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for c in lambda {
        if c.rhs.as_var() == Some(x) {
            return Err(NormalizeError::Shape(c.to_string()));
        }
        match bound_of(c, x) {
            None => others.push(c.clone()),
            Some((Rel::Gt | Rel::Ge, d)) => lower.push((c.rel == Rel::Gt, d)),
            Some((Rel::Lt | Rel::Le, d)) => upper.push((c.rel == Rel::Lt, d)),
            Some(_) => {
                return Err(NormalizeError::NotABound { var: x.name.clone(), constraint: c.to_string() })
            }
        }
    }
    for (ls, a) in &lower {
        for (us, b) in &upper {
            let rel = if *ls || *us { Rel::Lt } else { Rel::Le };
            others.push(AtomicConstraint::new((*a).clone(), rel, (*b).clone()).oriented());
        }
    }
    Ok(others)
}

fn substitute(lambda: &[AtomicConstraint], x: &Var, c: &ConstSym) -> Vec<AtomicConstraint> {
    lambda.iter().map(|k| k.substitute(x, c)).collect()
}

/// Steps I.I to I.III on one clause; may split it.
fn normalize_clause(clause: &Clause) -> Result<Vec<Clause>, NormalizeError> {
    for c in &clause.constraints {
        if c.rhs.as_var().is_some() {
            return Err(NormalizeError::Shape(c.to_string()));
        }
    }
    let free = clause.free_part_vars();
    let eliminable = |cl: &Clause| -> Vec<Var> {
        let mut seen = BTreeSet::new();
        cl.constraints
            .iter()
            .filter_map(|c| c.var())
            .filter(|v| v.sort == Sort::Base && !free.contains(*v) && seen.insert((*v).clone()))
            .cloned()
            .collect()
    };
    let mut current = clause.clone();
    // I.I: substitute equations.
    loop {
        let elim = eliminable(&current);
        let eq = current.constraints.iter().find_map(|c| match (c.var(), c.rel, &c.rhs) {
            (Some(v), Rel::Eq, Term::Const(d)) if elim.contains(v) => Some((v.clone(), d.clone())),
            _ => None,
        });
        let Some((x, d)) = eq else { break };
        current.constraints = substitute(&current.constraints, &x, &d);
    }
    // I.II: split disequations.
    let mut pending = vec![current];
    let mut split = Vec::new();
    while let Some(cl) = pending.pop() {
        let elim = eliminable(&cl);
        let pos = cl.constraints.iter().position(|c| c.rel == Rel::Ne && c.var().is_some_and(|v| elim.contains(v)));
        match pos {
            None => split.push(cl),
            Some(i) => {
                for rel in [Rel::Gt, Rel::Lt] {
                    let mut copy = cl.clone();
                    copy.constraints[i].rel = rel;
                    pending.push(copy);
                }
            }
        }
    }
    // I.III: Fourier-Motzkin for what is left.
    let mut out = Vec::with_capacity(split.len());
    for mut cl in split {
        for x in eliminable(&cl) {
            cl.constraints = fm_eliminate(&cl.constraints, &x)?;
        }
        out.push(cl);
    }
    Ok(out)
}

/// Brings a purified clause set into normal form: every base variable of a
/// constraint part also occurs in its free part and clauses share no
/// variables. Ground constraints are simplified and variant clauses merged.
pub fn normalize(set: &ClauseSet) -> Result<ClauseSet, NormalizeError> {
    let mut clauses = Vec::with_capacity(set.clauses.len());
    for c in &set.clauses {
        clauses.extend(normalize_clause(c)?);
    }
    let clauses = dedup_variants(simplify_clauses(clauses));
    let clauses = rename_apart(clauses, &set.reserved_names());
    Ok(ClauseSet::new(set.signature.clone(), clauses))
}

pub fn is_normal_form(set: &ClauseSet) -> (bool, Vec<Diagnostic>) {
    let d = normal_form_diagnostics(set);
    (d.is_empty(), d)
}
