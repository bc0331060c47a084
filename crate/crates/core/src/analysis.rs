//! Argument-position classes, instantiation points and alpha axioms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::syntax::{simplify_constraints, AtomicConstraint, Clause, ClauseSet, ConstSym, FreeAtom, Rel, Sort, Term, Var};
use crate::unionfind::UnionFind;

/// A predicate argument position; `index` counts from 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub predicate: String,
    pub index: usize,
}

impl Position {
    pub fn new(predicate: &str, index: usize) -> Position {
        Position { predicate: predicate.to_string(), index }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.predicate, self.index)
    }
}

/// Partition of all argument positions of a signature, linking positions at
/// which one clause uses the same variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApClassPartition {
    rep: BTreeMap<Position, Position>,
    sorts: BTreeMap<Position, Sort>,
}

impl ApClassPartition {
    /// Representative (least member) of the class of `pos`.
    pub fn class_of(&self, pos: &Position) -> Option<&Position> {
        self.rep.get(pos)
    }

    /// Class of the positions at which `var` occurs in `clause`; `None` if it
    /// occurs at no predicate argument.
    pub fn class_of_var(&self, clause: &Clause, var: &Var) -> Option<&Position> {
        clause.atoms().find_map(|a| match a {
            FreeAtom::Pred { symbol, args } => args
                .iter()
                .position(|t| t.as_var() == Some(var))
                .and_then(|i| self.class_of(&Position::new(symbol, i + 1))),
            FreeAtom::Eq(..) => None,
        })
    }

    pub fn sort_of(&self, class: &Position) -> Option<Sort> {
        self.sorts.get(class).copied()
    }

    /// Classes keyed by representative.
    pub fn classes(&self) -> BTreeMap<Position, BTreeSet<Position>> {
        let mut out: BTreeMap<Position, BTreeSet<Position>> = BTreeMap::new();
        for (p, r) in &self.rep {
            out.entry(r.clone()).or_default().insert(p.clone());
        }
        out
    }

    pub fn base_classes(&self) -> impl Iterator<Item = &Position> {
        self.sorts.iter().filter(|(p, s)| **s == Sort::Base && self.rep[*p] == **p).map(|(p, _)| p)
    }
}

pub fn ap_classes(set: &ClauseSet) -> ApClassPartition {
    let positions: Vec<Position> = set
        .signature
        .predicates
        .iter()
        .flat_map(|(p, sorts)| (1..=sorts.len()).map(move |i| Position::new(p, i)))
        .collect();
    let index: BTreeMap<&Position, usize> = positions.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut uf = UnionFind::new(positions.len());
    for clause in &set.clauses {
        let mut first: BTreeMap<&Var, usize> = BTreeMap::new();
        for a in clause.atoms() {
            let FreeAtom::Pred { symbol, args } = a else { continue };
            for (i, t) in args.iter().enumerate() {
                let Term::Var(v) = t else { continue };
                let Some(&here) = index.get(&Position::new(symbol, i + 1)) else { continue };
                match first.get(v) {
                    Some(&there) => uf.union(here, there),
                    None => {
                        first.insert(v, here);
                    }
                }
            }
        }
    }
    let mut least: BTreeMap<usize, Position> = BTreeMap::new();
    for (i, p) in positions.iter().enumerate() {
        least.entry(uf.find(i)).or_insert_with(|| p.clone());
    }
    let rep = positions.iter().enumerate().map(|(i, p)| (p.clone(), least[&uf.find(i)].clone())).collect();
    let sorts = set
        .signature
        .predicates
        .iter()
        .flat_map(|(p, sorts)| sorts.iter().enumerate().map(move |(i, s)| (Position::new(p, i + 1), *s)))
        .collect();
    ApClassPartition { rep, sorts }
}

/// Instantiation points per base-sort class, keyed by class representative.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct InstPointSet {
    pub points: BTreeMap<Position, BTreeSet<ConstSym>>,
}

impl InstPointSet {
    pub fn get(&self, class: &Position) -> Option<&BTreeSet<ConstSym>> {
        self.points.get(class)
    }

    /// Every alpha constant among the points.
    pub fn alpha_consts(&self) -> BTreeSet<ConstSym> {
        self.points.values().flatten().filter(|c| c.is_alpha()).cloned().collect()
    }
}

/// The point a bound `x ◁ d` contributes, if any.
fn contribution(rel: Rel, d: &ConstSym) -> Option<ConstSym> {
    match (rel, d) {
        (Rel::Eq, ConstSym::AlphaMinf) => None,
        (Rel::Eq, d) if d.is_alpha() => Some(d.clone()),
        (Rel::Eq | Rel::Ge, d) if d.is_plain_base() => Some(d.clone()),
        (Rel::Ne | Rel::Gt, d) if d.is_plain_base() => Some(ConstSym::eps(d.clone())),
        _ => None,
    }
}

pub fn inst_points(set: &ClauseSet, classes: &ApClassPartition) -> InstPointSet {
    let mut points: BTreeMap<Position, BTreeSet<ConstSym>> =
        classes.base_classes().map(|c| (c.clone(), [ConstSym::AlphaMinf].into())).collect();
    for clause in &set.clauses {
        for c in &clause.constraints {
            let (Term::Var(x), Term::Const(d)) = (&c.lhs, &c.rhs) else { continue };
            let (Some(class), Some(p)) = (classes.class_of_var(clause, x), contribution(c.rel, d)) else {
                continue;
            };
            if let Some(set) = points.get_mut(class) {
                set.insert(p);
            }
        }
    }
    InstPointSet { points }
}

fn axiom(constraints: Vec<AtomicConstraint>) -> Clause {
    Clause::constraint_only(constraints)
}

/// Constraint-only clauses pinning the meaning of the alpha constants in
/// `points` relative to the base constants `consts`.
pub fn alpha_axioms(points: &BTreeSet<ConstSym>, consts: &BTreeSet<ConstSym>) -> Vec<Clause> {
    let mut out = Vec::new();
    for a in points {
        match a {
            ConstSym::AlphaMinf => {
                for c in consts {
                    out.push(axiom(vec![AtomicConstraint::new(a.clone(), Rel::Ge, c.clone())]));
                }
            }
            ConstSym::AlphaEps(d) => {
                let d = (**d).clone();
                out.push(axiom(vec![AtomicConstraint::new(a.clone(), Rel::Le, d.clone())]));
                for c in consts.iter().filter(|c| **c != d) {
                    out.push(axiom(vec![
                        AtomicConstraint::new(d.clone(), Rel::Lt, c.clone()),
                        AtomicConstraint::new(a.clone(), Rel::Ge, c.clone()),
                    ]));
                }
                for c in consts.iter().filter(|c| **c != d) {
                    out.push(axiom(vec![
                        AtomicConstraint::new(d.clone(), Rel::Eq, c.clone()),
                        AtomicConstraint::new(a.clone(), Rel::Ne, ConstSym::eps(c.clone())),
                    ]));
                }
            }
            _ => {}
        }
    }
    out
}

/// Simplified axioms for `alpha`, closed under the alpha constants that the
/// surviving axioms introduce.
pub fn axiom_closure(alpha: &BTreeSet<ConstSym>, consts: &BTreeSet<ConstSym>) -> Vec<Clause> {
    let mut done: BTreeSet<ConstSym> = BTreeSet::new();
    let mut todo: BTreeSet<ConstSym> = alpha.iter().filter(|a| a.is_alpha()).cloned().collect();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    while let Some(a) = todo.pop_first() {
        done.insert(a.clone());
        for ax in alpha_axioms(&[a].into(), consts) {
            let Some(constraints) = simplify_constraints(&ax.constraints) else { continue };
            let ax = axiom(constraints);
            for c in ax.constants().filter(|c| c.is_alpha() && !done.contains(c)) {
                todo.insert(c.clone());
            }
            if seen.insert(ax.clone()) {
                out.push(ax);
            }
        }
    }
    out
}
