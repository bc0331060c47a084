use bsr_bench::{chain, random_sets, INTRO};
use bsr_core::ground::GroundOptions;
use bsr_core::{ground_all, normalize, parse, solve, DecideOptions};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn stages(c: &mut Criterion) {
    let set = parse(INTRO).unwrap();
    c.bench_function("parse/intro", |b| b.iter(|| parse(black_box(INTRO)).unwrap()));
    c.bench_function("normalize/intro", |b| b.iter(|| normalize(black_box(&set)).unwrap()));
    let n = normalize(&set).unwrap();
    c.bench_function("ground/intro", |b| b.iter(|| ground_all(black_box(&n), &GroundOptions::default()).unwrap()));
    c.bench_function("solve/intro", |b| b.iter(|| solve(black_box(&set), &DecideOptions::default()).unwrap()));
}

fn chains(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve/chain");
    for n in [1, 2, 3, 4] {
        let set = parse(&chain(n)).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &set, |b, s| {
            b.iter(|| solve(s, &DecideOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn random(c: &mut Criterion) {
    let sets = random_sets(11, 20);
    c.bench_function("solve/random20", |b| {
        b.iter(|| {
            for s in &sets {
                solve(s, &DecideOptions::default()).unwrap();
            }
        })
    });
}

criterion_group!(benches, stages, chains, random);
criterion_main!(benches);
