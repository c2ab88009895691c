//! Throughput of the data-parallel kernels on one thread versus the full pool.
//! Build with `--no-default-features` to measure the sequential fallback instead.

use std::hint::black_box;

use calab::exact::is_surjective;
use calab::gilman::propagation_reaches;
use calab::kurka::find_blocking_words;
use calab::spectral::{eigenvalue_scan, AlphaGrid, Observable};
use calab::{wolfram_rule, Alphabet, BernoulliMeasure, SeedStream};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let all = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut sizes = vec![1];
    if all > 1 {
        sizes.push(all);
    }
    sizes
        .into_iter()
        .map(|n| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
            (format!("{n}-threads"), pool)
        })
        .collect()
}

fn kernels(c: &mut Criterion) {
    let measure = BernoulliMeasure::uniform(Alphabet::BINARY);
    let g = Observable::letter_at_zero(&measure);
    let grid = AlphaGrid::uniform(256).unwrap();
    let stream = SeedStream::new(1, 0);
    let rules: Vec<_> = (0..256).map(|n| wolfram_rule(n).unwrap()).collect();

    let mut group = c.benchmark_group("kernels");
    group.sample_size(10);
    for (label, pool) in pools() {
        group.bench_function(BenchmarkId::new("surjectivity-256-ecas", &label), |b| {
            b.iter(|| pool.install(|| calab::par::map_slice(&rules, |r| is_surjective(r).unwrap().surjective)))
        });
        group.bench_function(BenchmarkId::new("eigenvalue-scan-rule-90", &label), |b| {
            b.iter(|| {
                pool.install(|| {
                    eigenvalue_scan(&rules[90], &measure, &g, &grid, 256, 16, 1024, &stream).unwrap()
                })
            })
        });
        group.bench_function(BenchmarkId::new("propagation-rule-30", &label), |b| {
            b.iter(|| pool.install(|| propagation_reaches(&rules[30], 0, 1, 16, 64, 2000, 4096, &stream).unwrap()))
        });
        group.bench_function(BenchmarkId::new("blocking-search-rule-128", &label), |b| {
            b.iter(|| pool.install(|| find_blocking_words(&rules[128], 1, 4, 16).unwrap()))
        });
    }
    group.finish();
    black_box(());
}

criterion_group!(benches, kernels);
criterion_main!(benches);
