//! Random problems small enough for the brute-force oracle.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::syntax::Rel;

#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    pub max_clauses: usize,
    pub max_predicates: usize,
    pub max_arity: usize,
    pub max_free_consts: usize,
    /// Integer constants are drawn from `-range..=range`.
    pub range: i64,
    /// At most this many distinct integers per problem.
    pub max_base_consts: usize,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig { max_clauses: 3, max_predicates: 2, max_arity: 2, max_free_consts: 2, range: 2, max_base_consts: 3 }
    }
}

/// Problem text with simple bounds only.
pub fn random_problem<R: Rng>(rng: &mut R, cfg: &GenConfig) -> String {
    let mut out = String::new();
    let mut pool: Vec<i64> = (-cfg.range..=cfg.range).collect();
    pool.shuffle(rng);
    pool.truncate(rng.gen_range(1..=cfg.max_base_consts));
    let free_consts: Vec<String> = ["c", "d", "e"].iter().take(rng.gen_range(0..=cfg.max_free_consts)).map(|s| s.to_string()).collect();
    let mut preds: Vec<(String, Vec<bool>)> = Vec::new();
    let npreds = if rng.gen_bool(0.35) { cfg.max_predicates } else { 1 };
    for i in 0..npreds {
        let sorts: Vec<bool> = (0..rng.gen_range(0..=cfg.max_arity)).map(|_| rng.gen_bool(0.6)).collect();
        let decl: Vec<&str> = sorts.iter().map(|&b| if b { "R" } else { "S" }).collect();
        let name = ["P", "Q"].get(i).map_or_else(|| format!("P{}", i), |s| s.to_string());
        let _ = writeln!(out, "pred {} : {}.", name, decl.join(" "));
        preds.push((name, sorts));
    }
    for c in &free_consts {
        let _ = writeln!(out, "const {} : S.", c);
    }
    for _ in 0..rng.gen_range(1..=cfg.max_clauses) {
        let mut base_vars = Vec::new();
        let atom = |rng: &mut R, base_vars: &mut Vec<String>| {
            let (name, sorts) = preds.choose(rng).expect("a predicate");
            if sorts.is_empty() {
                return name.clone();
            }
            let args: Vec<String> = sorts
                .iter()
                .map(|&base| {
                    if base {
                        if rng.gen_bool(0.15) {
                            pool.choose(rng).expect("pool").to_string()
                        } else {
                            let v = format!("x{}", rng.gen_range(1..=2));
                            base_vars.push(v.clone());
                            v
                        }
                    } else if !free_consts.is_empty() && rng.gen_bool(0.4) {
                        free_consts.choose(rng).expect("free constant").clone()
                    } else {
                        format!("u{}", rng.gen_range(1..=2))
                    }
                })
                .collect();
            format!("{}({})", name, args.join(", "))
        };
        // facts, rules, goals, or anything
        let (ante_n, succ_n) = match rng.gen_range(0..10) {
            0..=2 => (0, 1),
            3 | 4 => (1, 1),
            5..=8 => (rng.gen_range(1..=2), 0),
            _ => (rng.gen_range(0..=2), rng.gen_range(0..=2)),
        };
        let mut ante: Vec<String> = (0..ante_n).map(|_| atom(rng, &mut base_vars)).collect();
        let mut succ: Vec<String> = (0..succ_n).map(|_| atom(rng, &mut base_vars)).collect();
        if !free_consts.is_empty() && rng.gen_bool(0.15) {
            let eq = format!("u1 ~ {}", free_consts.choose(rng).expect("free constant"));
            if rng.gen_bool(0.5) {
                ante.push(eq);
            } else {
                succ.push(eq);
            }
        }
        if ante.is_empty() && succ.is_empty() {
            succ.push(atom(rng, &mut base_vars));
        }
        base_vars.sort();
        base_vars.dedup();
        let mut constraints = Vec::new();
        let mut bound = |rng: &mut R, v: &str| {
            let rel = Rel::ALL.choose(rng).expect("a relation");
            constraints.push(format!("{} {} {}", v, rel, pool.choose(rng).expect("pool")));
        };
        if !base_vars.is_empty() {
            for _ in 0..rng.gen_range(0..=1) {
                let v = base_vars.choose(rng).expect("a variable").clone();
                bound(rng, &v);
            }
        }
        // a variable of the constraint part only
        if rng.gen_bool(0.2) {
            bound(rng, "x3");
        }
        let _ = writeln!(out, "{} || {} -> {}.", constraints.join(", "), ante.join(", "), succ.join(", "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{check_fragment, parse, parse_raw, FragmentClass};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn generated_problems_parse_within_bounds() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let text = random_problem(&mut rng, &GenConfig::default());
            let raw = parse_raw(&text).unwrap_or_else(|e| panic!("{}\n{}", e, text));
            assert_eq!(check_fragment(&raw), FragmentClass::BsrSimpleBounds, "{}", text);
            let s = parse(&text).unwrap();
            assert!(s.bconsts().len() <= 3);
            assert!(s.fconsts().len() <= 2);
        }
    }
}
