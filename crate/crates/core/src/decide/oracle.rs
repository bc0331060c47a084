//! Brute force over a finite grid of reals and all quotients of the free
//! constants. Shares nothing with the main procedure beyond the syntax.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::syntax::{ClauseSet, ConstSym, FreeAtom, Rational, Sort, Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    Sat,
    Unsat,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large for the oracle: {0}")]
    OutOfBounds(String),
}

pub const MAX_BASE_CONSTANTS: usize = 3;
pub const MAX_FREE_CONSTANTS: usize = 2;
pub const MAX_ARITY: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Elem {
    Real(usize),
    Free(usize),
}

fn check_bounds(set: &ClauseSet) -> Result<Vec<i64>, OracleError> {
    let out = |m: String| Err(OracleError::OutOfBounds(m));
    let mut ints = Vec::new();
    for c in set.constants().into_iter().filter(|c| c.sort() == Sort::Base) {
        match c.as_numeric() {
            Some(q) if q.is_integer() => ints.push(q.to_integer().to_i64().ok_or_else(|| OracleError::OutOfBounds(c.to_string()))?),
            _ => return out(format!("non-integer base constant {}", c)),
        }
    }
    if ints.len() > MAX_BASE_CONSTANTS {
        return out(format!("{} base constants", ints.len()));
    }
    if set.fconsts().len() > MAX_FREE_CONSTANTS {
        return out(format!("{} free constants", set.fconsts().len()));
    }
    if let Some((p, s)) = set.signature.predicates.iter().find(|(_, s)| s.len() > MAX_ARITY) {
        return out(format!("predicate {} of arity {}", p, s.len()));
    }
    Ok(ints)
}

/// The integers from one below the least to one above the greatest constant
/// and the midpoints between them; `{0}` without constants.
fn grid(ints: &[i64]) -> Vec<Rational> {
    let (Some(&lo), Some(&hi)) = (ints.iter().min(), ints.iter().max()) else {
        return vec![Rational::from_integer(0.into())];
    };
    let mut g = Vec::new();
    for k in lo - 1..=hi + 1 {
        g.push(Rational::from_integer(k.into()));
        if k <= hi {
            g.push(Rational::new((2 * k + 1).into(), 2.into()));
        }
    }
    g
}

/// Every way of splitting `n` items into blocks, as block numbers.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &out {
            let blocks = p.iter().map(|b| b + 1).max().unwrap_or(0);
            for b in 0..=blocks {
                let mut q = p.clone();
                q.push(b);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Unit propagation, pure literals, then splitting on a literal of a
/// shortest clause.
fn satisfiable(mut clauses: Vec<Vec<i64>>) -> bool {
    loop {
        if clauses.is_empty() {
            return true;
        }
        if clauses.iter().any(Vec::is_empty) {
            return false;
        }
        let unit = clauses.iter().find(|c| c.len() == 1).map(|c| c[0]);
        let lit = unit.or_else(|| {
            let mut polarity: BTreeMap<i64, (bool, bool)> = BTreeMap::new();
            for &l in clauses.iter().flatten() {
                let e = polarity.entry(l.abs()).or_default();
                if l > 0 {
                    e.0 = true;
                } else {
                    e.1 = true;
                }
            }
            polarity.into_iter().find(|(_, (p, n))| p != n).map(|(a, (p, _))| if p { a } else { -a })
        });
        match lit {
            Some(l) => clauses = assume(&clauses, l),
            None => break,
        }
    }
    let l = clauses.iter().min_by_key(|c| c.len()).expect("nonempty")[0];
    satisfiable(assume(&clauses, l)) || satisfiable(assume(&clauses, -l))
}

fn assume(clauses: &[Vec<i64>], l: i64) -> Vec<Vec<i64>> {
    clauses
        .iter()
        .filter(|c| !c.contains(&l))
        .map(|c| c.iter().copied().filter(|&k| k != -l).collect())
        .collect()
}

struct Instance<'a> {
    grid: &'a [Rational],
    classes: usize,
    block: BTreeMap<&'a ConstSym, usize>,
    atoms: BTreeMap<(String, Vec<Elem>), i64>,
    cnf: Vec<Vec<i64>>,
}

impl<'a> Instance<'a> {
    fn elem(&self, t: &Term, beta: &BTreeMap<&Var, Elem>) -> Elem {
        match t {
            Term::Var(v) => beta[v].clone(),
            Term::Const(c) if c.sort() == Sort::Free => Elem::Free(self.block[c]),
            Term::Const(c) => {
                let q = c.as_numeric().expect("numeric");
                Elem::Real(self.grid.iter().position(|g| g == q).expect("constant on the grid"))
            }
        }
    }

    fn atom(&mut self, symbol: &str, args: Vec<Elem>) -> i64 {
        let next = self.atoms.len() as i64 + 1;
        *self.atoms.entry((symbol.to_string(), args)).or_insert(next)
    }

    fn add(&mut self, clause: &'a crate::syntax::Clause) {
        let vars = clause.vars();
        let sizes: Vec<usize> =
            vars.iter().map(|v| if v.sort == Sort::Base { self.grid.len() } else { self.classes }).collect();
        let mut counter = vec![0usize; vars.len()];
        'assign: loop {
            let beta: BTreeMap<&Var, Elem> = vars
                .iter()
                .zip(&counter)
                .map(|(v, &i)| (v, if v.sort == Sort::Base { Elem::Real(i) } else { Elem::Free(i) }))
                .collect();
            self.instance(clause, &beta);
            for i in 0..counter.len() {
                counter[i] += 1;
                if counter[i] < sizes[i] {
                    continue 'assign;
                }
                counter[i] = 0;
            }
            break;
        }
    }

    fn instance(&mut self, clause: &crate::syntax::Clause, beta: &BTreeMap<&Var, Elem>) {
        for k in &clause.constraints {
            let (Elem::Real(l), Elem::Real(r)) = (self.elem(&k.lhs, beta), self.elem(&k.rhs, beta)) else {
                unreachable!("base-sort constraint")
            };
            if !k.rel.holds(self.grid[l].cmp(&self.grid[r])) {
                return;
            }
        }
        let mut lits = Vec::new();
        for (positive, atoms) in [(false, &clause.antecedent), (true, &clause.succedent)] {
            for a in atoms {
                match a {
                    FreeAtom::Eq(l, r) => {
                        if (self.elem(l, beta) == self.elem(r, beta)) == positive {
                            return;
                        }
                    }
                    FreeAtom::Pred { symbol, args } => {
                        let args = args.iter().map(|t| self.elem(t, beta)).collect();
                        let id = self.atom(symbol, args);
                        lits.push(if positive { id } else { -id });
                    }
                }
            }
        }
        self.cnf.push(lits);
    }
}

/// Decides a small clause set by grounding it over a finite grid for the
/// base sort and the classes of each partition of the free constants.
pub fn oracle_solve(set: &ClauseSet) -> Result<OracleVerdict, OracleError> {
    let ints = check_bounds(set)?;
    let grid = grid(&ints);
    let fconsts: Vec<ConstSym> = set.fconsts().into_iter().collect();
    for blocks in set_partitions(fconsts.len()) {
        let classes = blocks.iter().max().map_or(1, |b| b + 1);
        let mut inst = Instance {
            grid: &grid,
            classes,
            block: fconsts.iter().zip(&blocks).map(|(c, &b)| (c, b)).collect(),
            atoms: BTreeMap::new(),
            cnf: Vec::new(),
        };
        for c in &set.clauses {
            inst.add(c);
        }
        if satisfiable(inst.cnf) {
            return Ok(OracleVerdict::Sat);
        }
    }
    Ok(OracleVerdict::Unsat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;

    fn oracle(text: &str) -> OracleVerdict {
        oracle_solve(&parse(text).unwrap()).unwrap()
    }

    #[test]
    fn grid_points() {
        let g: Vec<String> = grid(&[0, 1]).iter().map(|q| q.to_string()).collect();
        assert_eq!(g, ["-1", "-1/2", "0", "1/2", "1", "3/2", "2"]);
        assert_eq!(grid(&[]).len(), 1);
    }

    #[test]
    fn partitions_counted() {
        assert_eq!(set_partitions(3).len(), 5);
        assert_eq!(set_partitions(0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn small_verdicts() {
        assert_eq!(oracle("pred T : R.\nx < 3 || -> T(x).\ny >= 0 || T(y) ->."), OracleVerdict::Unsat);
        assert_eq!(oracle("pred P : S.\nconst c : S.\n|| -> P(c)."), OracleVerdict::Sat);
        assert_eq!(oracle(crate::frontend::tests_support::INTRO), OracleVerdict::Sat);
        assert_eq!(oracle("pred P : R.\nx > 0, x < 1 || -> P(x).\ny > 0, y < 1 || P(y) ->."), OracleVerdict::Unsat);
        assert_eq!(oracle("const a : S.\nconst b : S.\n|| -> a ~ b.\n|| a ~ b ->."), OracleVerdict::Unsat);
    }

    #[test]
    fn bounds_enforced() {
        let s = parse("pred P : R.\nx = 1/2 || -> P(x).").unwrap();
        assert!(oracle_solve(&s).is_err());
        let s = parse("pred P : R.\nx = @minf || -> P(x).").unwrap();
        assert!(oracle_solve(&s).is_err());
    }

    #[test]
    fn dpll_basics() {
        assert!(satisfiable(vec![vec![1, 2], vec![-1], vec![-2, 3]]));
        assert!(!satisfiable(vec![vec![1], vec![-1, 2], vec![-2]]));
    }
}
