use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use techrank_bench::sized_graphs;
use techrank_core::walker::{self, WalkerParams};

fn bench_transition_matrices(c: &mut Criterion) {
    let mut group = c.benchmark_group("transition_matrices");
    for (label, graph) in sized_graphs() {
        group.bench_with_input(BenchmarkId::from_parameter(&label), &graph, |b, g| {
            b.iter(|| walker::transition_matrices(black_box(g), 0.48, -1.04).unwrap());
        });
    }
    group.finish();
}

fn bench_run_to_convergence(c: &mut Criterion) {
    let mut group = c.benchmark_group("walker_run");
    group.sample_size(10);
    let params = WalkerParams::new(0.48, -1.04);
    for (label, graph) in sized_graphs() {
        group.bench_with_input(BenchmarkId::from_parameter(&label), &graph, |b, g| {
            b.iter(|| walker::run(black_box(g), &params).unwrap());
        });
    }
    group.finish();
}

criterion_group!(benches, bench_transition_matrices, bench_run_to_convergence);
criterion_main!(benches);
