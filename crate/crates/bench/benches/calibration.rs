use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use techrank_core::calibration::{calibrate, normalize_minmax, spearman, GridSpec};
use techrank_core::graph::Layer;
use techrank_core::synth::random_connected_bipartite;
use techrank_core::walker::{self, WalkerParams};

fn bench_spearman(c: &mut Criterion) {
    let x: Vec<f64> = (0..10_000).map(|i| ((i * 37) % 101) as f64).collect();
    let y: Vec<f64> = (0..10_000).map(|i| ((i * 53) % 89) as f64).collect();
    c.bench_function("spearman_10k", |b| {
        b.iter(|| spearman(black_box(&x), black_box(&y)).unwrap());
    });
}

fn bench_grid_search(c: &mut Criterion) {
    let graph = random_connected_bipartite(60, 20, 120, 5);
    let truth = normalize_minmax(
        &walker::run(&graph, &WalkerParams::new(0.52, -1.04))
            .unwrap()
            .company_weights,
    );
    let grid = GridSpec::new(-0.6, 0.6, -1.2, 0.0, 0.12).unwrap();
    let mut group = c.benchmark_group("calibration");
    group.sample_size(10);
    group.bench_function("grid_11x11_60x20", |b| {
        b.iter(|| {
            calibrate(
                black_box(&graph),
                black_box(&truth),
                Layer::Companies,
                &grid,
                &WalkerParams::default(),
            )
            .unwrap()
        });
    });
    group.finish();
}

criterion_group!(benches, bench_spearman, bench_grid_search);
criterion_main!(benches);
