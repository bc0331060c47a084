//! Fixtures shared by the pipeline benchmarks.

use bsr_core::testgen::{random_problem, GenConfig};
use bsr_core::{parse, ClauseSet};
use rand::rngs::StdRng;
use rand::SeedableRng;

pub const INTRO: &str = "pred Q : S R.\npred R : R.\nconst c : S.\n\
    x2 != 5 || R(x1) -> Q(u1, x2).\ny1 < 7, y2 <= 2 || -> Q(c, y2), R(y1).\n";

/// A chain `P0(x) -> P1(x) -> ...` with a bound per link, `n` links long.
pub fn chain(n: usize) -> String {
    let mut text = String::new();
    for i in 0..=n {
        text.push_str(&format!("pred P{} : R.\n", i));
    }
    text.push_str("x < 0 || -> P0(x).\n");
    for i in 0..n {
        text.push_str(&format!("x > {} || P{}(x) -> P{}(x).\n", i, i, i + 1));
    }
    text
}

/// `count` random problems from a fixed seed.
pub fn random_sets(seed: u64, count: usize) -> Vec<ClauseSet> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count).map(|_| parse(&random_problem(&mut rng, &GenConfig::default())).expect("generated text parses")).collect()
}
