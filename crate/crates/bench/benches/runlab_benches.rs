use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use runlab::blockfactor::{
    adversarial_min, construct_h, exact_run_probability, mc_estimate, verify_impossibility, MinimizeMode,
    DEFAULT_EXHAUSTIVE_LIMIT,
};
use runlab::coloring::{chromatic_number, find_mono_path, search_coloring, CheckMode, SearchLimits};
use runlab::{DeBruijnGraph, GridFunction, Noise, ProcessSpec, RunEvent};

fn graph(c: &mut Criterion) {
    let mut group = c.benchmark_group("debruijn");
    for (k, m) in [(2, 64), (3, 24), (4, 16)] {
        group.bench_with_input(BenchmarkId::new("build", format!("{k}_{m}")), &(k, m), |b, &(k, m)| {
            b.iter(|| DeBruijnGraph::new(black_box(k), black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn coloring(c: &mut Criterion) {
    let g = DeBruijnGraph::new(2, 9).unwrap();
    c.bench_function("chromatic_2_9", |b| b.iter(|| chromatic_number(black_box(&g), 64).unwrap()));

    let found = search_coloring(3, 9, 2, 3, &SearchLimits::default()).unwrap();
    let vc = found.coloring().unwrap().clone();
    let g = DeBruijnGraph::new(3, 9).unwrap();
    c.bench_function("search_3_9", |b| {
        b.iter(|| search_coloring(3, 9, 2, 3, &SearchLimits::default()).unwrap())
    });
    c.bench_function("mono_path_3_9", |b| b.iter(|| find_mono_path(&g, black_box(&vc), 3).unwrap()));

    let h = construct_h(&vc).unwrap();
    let mut group = c.benchmark_group("verify_h");
    group.sample_size(10);
    group.bench_function("sampled_3_9", |b| {
        b.iter(|| verify_impossibility(&h, CheckMode::Sampled, 10_000, 1).unwrap())
    });
    group.finish();
}

fn probabilities(c: &mut Criterion) {
    let table: Vec<u32> = (0..8u32.pow(3)).map(|i| (i.wrapping_mul(2_654_435_761) >> 7) % 2).collect();
    let f = GridFunction::discrete(3, 8, 2, table).unwrap();
    let mut group = c.benchmark_group("run_probability");
    for l in [2, 4, 8] {
        group.bench_with_input(BenchmarkId::new("exact", l), &l, |b, &l| {
            b.iter(|| exact_run_probability(&f, RunEvent::Constant, l).unwrap())
        });
    }
    let spec = ProcessSpec::new(f.clone(), Noise::Discrete);
    group.bench_function("mc_100k", |b| {
        b.iter(|| mc_estimate(&spec, RunEvent::Constant, 4, 100_000, 7).unwrap())
    });
    group.finish();

    c.bench_function("adversarial_min_2_3", |b| {
        b.iter(|| adversarial_min(2, 3, 2, 2, MinimizeMode::Exhaustive, DEFAULT_EXHAUSTIVE_LIMIT).unwrap())
    });
}

criterion_group!(benches, graph, coloring, probabilities);
criterion_main!(benches);
