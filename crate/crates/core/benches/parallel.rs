//! Sequential versus data-parallel throughput of the two estimators.
//!
//! Each benchmark runs once inside a one-thread rayon pool and once inside a
//! pool sized to the machine, with at least two workers. Building with
//! `--no-default-features` replaces the rayon core by plain sequential loops,
//! so both groups then measure the fallback.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use polybloch::bloch::BlochConfig;
use polybloch::essential::{EstimateConfig, SymbolPair};
use polybloch::{estimate_bloch_norms, estimate_sups, parse_expr, parse_map, DeltaLadder};

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    // at least two workers so the comparison exists even on a single core
    let wide = std::thread::available_parallelism().map_or(1, |n| n.get()).max(2);
    [1, wide]
        .into_iter()
        .map(|t| {
            let label = if t == 1 { "sequential".to_string() } else { format!("parallel-{t}") };
            (label, rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap())
        })
        .collect()
}

fn sups(c: &mut Criterion) {
    let pair = SymbolPair::trusted(
        parse_map("mob(0.3, z1); z1*z2", 2).unwrap(),
        parse_map("pow(z1, 2); scale(0.9, z2)", 2).unwrap(),
    )
    .unwrap();
    let ladder = DeltaLadder::default();
    let mut group = c.benchmark_group("estimate_sups");
    group.sample_size(10);
    for budget in [20_000usize, 100_000] {
        let config = EstimateConfig::new(budget, 7);
        for (label, pool) in pools() {
            group.bench_with_input(BenchmarkId::new(label, budget), &budget, |b, _| {
                b.iter(|| pool.install(|| estimate_sups(&pair, &ladder, &config).unwrap()))
            });
        }
    }
    group.finish();
}

fn bloch(c: &mut Criterion) {
    let f = parse_expr("scale(0.5, log((1+z1)/(1-z1))) + z2*z3", 3).unwrap();
    let mut group = c.benchmark_group("estimate_bloch_norms");
    group.sample_size(10);
    for budget in [20_000usize, 100_000] {
        let config = BlochConfig::new(budget, 7);
        for (label, pool) in pools() {
            group.bench_with_input(BenchmarkId::new(label, budget), &budget, |b, _| {
                b.iter(|| pool.install(|| estimate_bloch_norms(&f, 3, &config).unwrap()))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sups, bloch);
criterion_main!(benches);
