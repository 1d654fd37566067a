//! Shared fixtures for the criterion benchmarks.

use techrank_core::graph::BipartiteGraph;
use techrank_core::synth::random_connected_bipartite;

/// Graphs roughly matching the shapes the pipeline sees in practice.
pub fn sized_graphs() -> Vec<(String, BipartiteGraph)> {
    [
        (100usize, 30usize, 250usize),
        (500, 120, 1_500),
        (2_400, 480, 9_000),
    ]
    .into_iter()
    .map(|(n_c, n_t, extra)| {
        (
            format!("{n_c}x{n_t}"),
            random_connected_bipartite(n_c, n_t, extra, 9),
        )
    })
    .collect()
}
