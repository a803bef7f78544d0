#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use streampart::bitvec::PlaConfig;
use streampart::extpq::ExtPqConfig;
use streampart::graph_io::{BlockId, InMemoryGraph};
use streampart::partitioner::{run_partition, Backend, PartitionConfig};
use streampart::PartitionResult;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

pub const REAL_GRAPHS: [&str; 4] = [
    "karate.metis",
    "les_miserables.metis",
    "florentine.metis",
    "davis_southern_women.metis",
];

/// Erdős–Rényi style graph with about `n * avg / 2` edges.
pub fn random_graph(n: u64, avg: f64, seed: u64) -> InMemoryGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = (n as f64 * avg / 2.0) as usize;
    let list: Vec<(u64, u64)> = (0..edges)
        .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
        .collect();
    InMemoryGraph::from_edges(n, list)
}

/// Compressed, batched, and external backends, including a tiny queue
/// budget that forces spilling.
pub fn index_backends() -> Vec<Backend> {
    vec![
        Backend::Array,
        Backend::Cpi(PlaConfig::default()),
        Backend::Cpi(PlaConfig::new(4, 1)),
        Backend::CpiBatch {
            beta: 7,
            pla: PlaConfig::default(),
        },
        Backend::CpiBatch {
            beta: 1000,
            pla: PlaConfig::new(12, 16),
        },
        Backend::ExtPq(ExtPqConfig::default()),
        Backend::ExtPq(ExtPqConfig::default().with_buffer_bytes(256)),
    ]
}

pub fn partition(
    g: &InMemoryGraph,
    cfg: &PartitionConfig,
    backend: &Backend,
) -> (PartitionResult, Vec<BlockId>) {
    let mut out = Vec::new();
    let r = run_partition(g.stream(), cfg, backend, &mut out).unwrap();
    (r, out)
}

/// Edge cut by a double loop over the edge list.
pub fn brute_force_cut(g: &InMemoryGraph, parts: &[BlockId]) -> u64 {
    g.edges()
        .filter(|&(u, w)| parts[u as usize] != parts[w as usize])
        .count() as u64
}
