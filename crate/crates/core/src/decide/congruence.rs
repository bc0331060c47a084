use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::syntax::ConstSym;

/// An equivalence on free constants; each class is represented by its least
/// member.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FreeCongruence {
    rep: BTreeMap<ConstSym, ConstSym>,
}

impl FreeCongruence {
    /// Builds the congruence from classes; empty classes are ignored.
    pub fn from_classes(classes: impl IntoIterator<Item = BTreeSet<ConstSym>>) -> FreeCongruence {
        let mut rep = BTreeMap::new();
        for class in classes {
            if let Some(least) = class.first().cloned() {
                for c in class {
                    rep.insert(c, least.clone());
                }
            }
        }
        FreeCongruence { rep }
    }

    /// The congruence encoded by a restricted growth string over `consts`.
    pub fn from_rgs(consts: &[ConstSym], rgs: &[usize]) -> FreeCongruence {
        let mut classes: BTreeMap<usize, BTreeSet<ConstSym>> = BTreeMap::new();
        for (c, &b) in consts.iter().zip(rgs) {
            classes.entry(b).or_default().insert(c.clone());
        }
        FreeCongruence::from_classes(classes.into_values())
    }

    pub fn rep_of(&self, c: &ConstSym) -> Option<&ConstSym> {
        self.rep.get(c)
    }

    /// Classes ordered by representative.
    pub fn classes(&self) -> BTreeMap<ConstSym, BTreeSet<ConstSym>> {
        let mut out: BTreeMap<ConstSym, BTreeSet<ConstSym>> = BTreeMap::new();
        for (c, r) in &self.rep {
            out.entry(r.clone()).or_default().insert(c.clone());
        }
        out
    }
}

impl fmt::Display for FreeCongruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (rep, members) in self.classes() {
            let names: Vec<String> = members.iter().map(|c| c.to_string()).collect();
            writeln!(f, "class {{{}}} -> {}", names.join(", "), rep)?;
        }
        Ok(())
    }
}

/// Restricted growth strings of length `n` in lexicographic order; each one
/// is a set partition of `0..n`.
pub struct Partitions {
    current: Option<Vec<usize>>,
}

pub fn partitions(n: usize) -> Partitions {
    Partitions { current: Some(vec![0; n]) }
}

impl Iterator for Partitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        // bump the rightmost position that may grow, reset the tail
        let mut i = next.len();
        while i > 1 {
            i -= 1;
            let max_prefix = next[..i].iter().copied().max().unwrap_or(0);
            if next[i] <= max_prefix {
                next[i] += 1;
                for x in &mut next[i + 1..] {
                    *x = 0;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (0..7).map(|n| partitions(n).count()).collect();
        assert_eq!(counts, [1, 1, 2, 5, 15, 52, 203]);
    }

    #[test]
    fn rgs_order() {
        let all: Vec<Vec<usize>> = partitions(3).collect();
        assert_eq!(all, [vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 0], vec![0, 1, 1], vec![0, 1, 2]]);
    }

    #[test]
    fn representatives_are_least() {
        let cs = [ConstSym::free("b"), ConstSym::free("a"), ConstSym::free("c")];
        let g = FreeCongruence::from_rgs(&cs, &[0, 0, 1]);
        assert_eq!(g.rep_of(&ConstSym::free("b")), Some(&ConstSym::free("a")));
        assert_eq!(g.to_string(), "class {a, b} -> a\nclass {c} -> c\n");
    }
}
