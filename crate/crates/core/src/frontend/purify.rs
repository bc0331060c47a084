use std::collections::BTreeSet;

use crate::syntax::{AtomicConstraint, Clause, ClauseSet, FreeAtom, Rel, Sort, Term, Var};

fn purify_clause(clause: &Clause, reserved: &BTreeSet<String>) -> Clause {
    let mut used: BTreeSet<String> = clause.vars().into_iter().map(|v| v.name).collect();
    let mut next = 0;
    let mut bindings = Vec::new();
    let mut fresh_for = |t: &Term| -> Term {
        match t {
            Term::Const(c) if c.sort() == Sort::Base => {
                let name = loop {
                    let n = format!("x{}", next);
                    next += 1;
                    if !used.contains(&n) && !reserved.contains(&n) {
                        break n;
                    }
                };
                used.insert(name.clone());
                let v = Var::base(&name);
                bindings.push(AtomicConstraint::new(v.clone(), Rel::Eq, c.clone()));
                Term::Var(v)
            }
            t => t.clone(),
        }
    };
    let mut map = |atoms: &[FreeAtom]| -> Vec<FreeAtom> {
        atoms
            .iter()
            .map(|a| match a {
                FreeAtom::Pred { symbol, args } => {
                    FreeAtom::Pred { symbol: symbol.clone(), args: args.iter().map(&mut fresh_for).collect() }
                }
                eq => eq.clone(),
            })
            .collect()
    };
    let antecedent = map(&clause.antecedent);
    let succedent = map(&clause.succedent);
    let mut constraints = clause.constraints.clone();
    constraints.extend(bindings);
    Clause { id: clause.id, constraints, antecedent, succedent }
}

/// Replaces every base constant at a predicate argument by a fresh variable
/// bound to it, one variable per occurrence.
pub fn purify(set: &ClauseSet) -> ClauseSet {
    let reserved = set.reserved_names();
    let clauses = set.clauses.iter().map(|c| purify_clause(c, &reserved)).collect();
    ClauseSet::new(set.signature.clone(), clauses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{ConstSym, Signature};

    fn sig() -> Signature {
        let mut s = Signature::default();
        s.declare_predicate("P", vec![Sort::Base]);
        s
    }

    #[test]
    fn one_variable_per_occurrence() {
        let c = Clause::new(vec![], vec![], vec![FreeAtom::pred("P", vec![ConstSym::int(3).into()])]);
        let out = purify(&ClauseSet::new(sig(), vec![c.clone()]));
        assert_eq!(out.clauses[0].to_string(), "x0 = 3 || -> P(x0).");
        let mut twice = c.clone();
        twice.succedent.push(twice.succedent[0].clone());
        let out = purify(&ClauseSet::new(sig(), vec![twice]));
        assert_eq!(out.clauses[0].to_string(), "x0 = 3, x1 = 3 || -> P(x0), P(x1).");
        assert!(out.flags().purified);
    }

    #[test]
    fn pure_clause_unchanged() {
        let c = Clause::new(vec![], vec![], vec![FreeAtom::pred("P", vec![Var::base("x0").into()])]);
        let set = ClauseSet::new(sig(), vec![c]);
        assert_eq!(purify(&set), set);
    }
}
