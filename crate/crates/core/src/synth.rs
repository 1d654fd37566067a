//! Seeded random graph generators for tests and benchmarks.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::graph::{BipartiteGraph, EntityRegistry, InvestmentGraph};

/// Connected random bipartite graph with `n_companies + n_technologies - 1`
/// spanning edges plus up to `extra_edges` additional random links.
///
/// Every node has degree at least one and the graph is connected, so the
/// walker's fixed point is unique. Identical seeds produce identical graphs.
pub fn random_connected_bipartite(
    n_companies: usize,
    n_technologies: usize,
    extra_edges: usize,
    seed: u64,
) -> BipartiteGraph {
    assert!(n_companies >= 1 && n_technologies >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    #[derive(Clone, Copy)]
    enum Node {
        Company(usize),
        Technology(usize),
    }

    let mut pending: Vec<Node> = (1..n_companies)
        .map(Node::Company)
        .chain((1..n_technologies).map(Node::Technology))
        .collect();
    pending.shuffle(&mut rng);

    let mut placed_companies = vec![0usize];
    let mut placed_technologies = vec![0usize];
    let mut edges = std::collections::BTreeSet::new();
    edges.insert((0usize, 0usize));

    for node in pending {
        match node {
            Node::Company(c) => {
                let t = placed_technologies[rng.random_range(0..placed_technologies.len())];
                edges.insert((c, t));
                placed_companies.push(c);
            }
            Node::Technology(t) => {
                let c = placed_companies[rng.random_range(0..placed_companies.len())];
                edges.insert((c, t));
                placed_technologies.push(t);
            }
        }
    }
    for _ in 0..extra_edges {
        let c = rng.random_range(0..n_companies);
        let t = rng.random_range(0..n_technologies);
        edges.insert((c, t));
    }

    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n_companies];
    for (c, t) in edges {
        rows[c].push(t);
    }
    let company_names: Vec<String> = (0..n_companies).map(|i| format!("c{i}")).collect();
    let technology_names: Vec<String> = (0..n_technologies).map(|i| format!("t{i}")).collect();
    BipartiteGraph::from_rows(&company_names, &technology_names, rows)
        .expect("generated graph is valid")
}

/// Random investment graph over an existing company registry. Each
/// investor-company pair gets an edge with probability `density`; at least
/// one positive amount is guaranteed.
pub fn random_investments(
    n_investors: usize,
    companies: &EntityRegistry,
    density: f64,
    max_amount: f64,
    seed: u64,
) -> InvestmentGraph {
    assert!(n_investors >= 1 && !companies.is_empty());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries: Vec<(String, String, f64)> = Vec::new();
    for i in 0..n_investors {
        for c in 0..companies.len() {
            if rng.random::<f64>() < density {
                entries.push((
                    format!("i{i}"),
                    companies.name(c).to_string(),
                    rng.random::<f64>() * max_amount,
                ));
            }
        }
    }
    if entries.iter().all(|(_, _, a)| *a <= 0.0) {
        entries.push(("i0".to_string(), companies.name(0).to_string(), max_amount));
    }
    InvestmentGraph::from_entries(companies.clone(), entries).expect("generated amounts are valid")
}
