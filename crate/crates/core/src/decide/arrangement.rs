use std::collections::BTreeMap;
use std::fmt;
use std::ops::ControlFlow;

use num_traits::Zero;

use super::GroundClause;
use crate::syntax::{ConstSym, Rational, Rel};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    pub members: Vec<ConstSym>,
    /// The value of the numeral in the group, if there is one.
    pub anchor: Option<Rational>,
}

/// A total preorder of base constants, as strictly increasing groups of
/// equal constants.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Arrangement {
    pub groups: Vec<Group>,
}

impl Arrangement {
    /// One group per numeral, in numeric order.
    pub fn numeric<'a>(numerals: impl IntoIterator<Item = &'a Rational>) -> Arrangement {
        let mut values: Vec<&Rational> = numerals.into_iter().collect();
        values.sort();
        values.dedup();
        Arrangement {
            groups: values
                .into_iter()
                .map(|q| Group { members: vec![ConstSym::Numeric(q.clone())], anchor: Some(q.clone()) })
                .collect(),
        }
    }

    pub fn group_of(&self, c: &ConstSym) -> Option<usize> {
        self.groups.iter().position(|g| g.members.contains(c))
    }

    /// Index of every constant's group.
    pub fn index(&self) -> BTreeMap<ConstSym, usize> {
        self.groups.iter().enumerate().flat_map(|(i, g)| g.members.iter().map(move |c| (c.clone(), i))).collect()
    }

    fn insert(&mut self, c: ConstSym, choice: Choice) {
        match choice {
            Choice::New(p) => self.groups.insert(p, Group { members: vec![c], anchor: None }),
            Choice::Join(p) => self.groups[p].members.push(c),
        }
    }

    fn remove(&mut self, choice: Choice) {
        match choice {
            Choice::New(p) => {
                self.groups.remove(p);
            }
            Choice::Join(p) => {
                self.groups[p].members.pop();
            }
        }
    }
}

impl fmt::Display for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.groups.iter().enumerate() {
            if i > 0 {
                write!(f, " < ")?;
            }
            for (j, c) in g.members.iter().enumerate() {
                if j > 0 {
                    write!(f, " = ")?;
                }
                write!(f, "{}", c)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
enum Choice {
    New(usize),
    Join(usize),
}

/// Decides a ground constraint by comparing group positions.
pub fn eval_by_groups(index: &BTreeMap<ConstSym, usize>, l: &ConstSym, rel: Rel, r: &ConstSym) -> bool {
    rel.holds(index[l].cmp(&index[r]))
}

struct Search<'a, F> {
    order: Vec<ConstSym>,
    /// Constraint-only clauses grouped by the depth after which all their
    /// constants are placed.
    checks: Vec<Vec<&'a GroundClause>>,
    emit: F,
}

impl<F: FnMut(&Arrangement) -> ControlFlow<()>> Search<'_, F> {
    fn violated(arr: &Arrangement, clauses: &[&GroundClause]) -> bool {
        if clauses.is_empty() {
            return false;
        }
        let index = arr.index();
        clauses.iter().any(|c| c.constraints.iter().all(|(l, r, rr)| eval_by_groups(&index, l, *r, rr)))
    }

    fn run(&mut self, arr: &mut Arrangement, depth: usize) -> ControlFlow<()> {
        if depth == self.order.len() {
            return (self.emit)(arr);
        }
        let c = self.order[depth].clone();
        let g = arr.groups.len();
        let choices = (0..=g).flat_map(|p| {
            let join = (p < g).then_some(Choice::Join(p));
            std::iter::once(Choice::New(p)).chain(join)
        });
        for choice in choices.collect::<Vec<_>>() {
            arr.insert(c.clone(), choice);
            let pruned = Self::violated(arr, &self.checks[depth + 1]);
            let flow = if pruned { ControlFlow::Continue(()) } else { self.run(arr, depth + 1) };
            arr.remove(choice);
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// Calls `emit` on every arrangement of the base constants of `clauses`
/// that extends the numeric order and violates no constraint-only clause,
/// in a fixed order. Stops early when `emit` breaks.
pub fn enumerate_arrangements<F>(clauses: &[GroundClause], emit: F) -> ControlFlow<()>
where
    F: FnMut(&Arrangement) -> ControlFlow<()>,
{
    let consts = super::base_constants(clauses);
    let numerals = consts.iter().filter_map(ConstSym::as_numeric);
    let mut arr = Arrangement::numeric(numerals);
    let order: Vec<ConstSym> = consts.iter().filter(|c| c.as_numeric().is_none()).cloned().collect();
    let depth_of: BTreeMap<&ConstSym, usize> = order.iter().enumerate().map(|(i, c)| (c, i + 1)).collect();
    let mut checks = vec![Vec::new(); order.len() + 1];
    for c in clauses.iter().filter(|c| c.is_constraint_only()) {
        let d = c
            .constraints
            .iter()
            .flat_map(|(l, _, r)| [l, r])
            .map(|k| depth_of.get(k).copied().unwrap_or(0))
            .max()
            .unwrap_or(0);
        checks[d].push(c);
    }
    if Search::<F>::violated(&arr, &checks[0]) {
        return ControlFlow::Continue(());
    }
    let mut search = Search { order, checks, emit };
    search.run(&mut arr, 0)
}

/// Rational values for every constant of the arrangement: anchors keep their
/// value, groups between two anchors are spaced evenly, groups outside the
/// anchors step away by 1, and without anchors groups take 0, 1, 2, ...
pub fn realize_arrangement(arr: &Arrangement) -> BTreeMap<ConstSym, Rational> {
    let values = group_values(arr);
    arr.groups
        .iter()
        .zip(values)
        .flat_map(|(g, v)| g.members.iter().map(move |c| (c.clone(), v.clone())))
        .collect()
}

pub(crate) fn group_values(arr: &Arrangement) -> Vec<Rational> {
    let n = arr.groups.len();
    let anchors: Vec<usize> = (0..n).filter(|&i| arr.groups[i].anchor.is_some()).collect();
    let anchor = |i: usize| arr.groups[i].anchor.clone().expect("anchored");
    let mut out = vec![Rational::zero(); n];
    let Some(&first) = anchors.first() else {
        for (i, v) in out.iter_mut().enumerate() {
            *v = Rational::from_integer(i.into());
        }
        return out;
    };
    let last = *anchors.last().expect("nonempty");
    for i in 0..first {
        out[i] = anchor(first) - Rational::from_integer((first - i).into());
    }
    for i in last..n {
        out[i] = anchor(last) + Rational::from_integer((i - last).into());
    }
    for w in anchors.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (va, vb) = (anchor(a), anchor(b));
        let k = Rational::from_integer((b - a).into());
        for i in a..=b {
            out[i] = &va + (&vb - &va) * Rational::from_integer((i - a).into()) / &k;
        }
    }
    debug_assert!(out.windows(2).all(|w| w[0] < w[1]));
    out
}
