use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{chunk_bounds, GenConfig};
use crate::error::Result;
use crate::graph_io::{GraphHeader, NodeId, NodeRecord, NodeStream};

/// Preferential-attachment stream.
///
/// The first `d + 1` nodes form a clique; every later node attaches to `d`
/// distinct earlier nodes chosen with probability proportional to degree.
/// Sampling runs over a Fenwick tree of degrees (O(n) state). To emit a
/// chunk with full neighborhoods the attachment process is replayed from
/// the seed and only edges touching the chunk are kept.
pub struct BaStream {
    n: u64,
    degree: u64,
    seed: u64,
    chunks: u64,
    chunk: u64,
    lo: u64,
    adjacency: Vec<Vec<NodeId>>,
    cursor: usize,
}

impl BaStream {
    pub(super) fn new(cfg: &GenConfig) -> Self {
        Self {
            n: cfg.n,
            degree: cfg.ba_degree,
            seed: cfg.seed,
            chunks: cfg.chunks.min(cfg.n),
            chunk: 0,
            lo: 0,
            adjacency: Vec::new(),
            cursor: 0,
        }
    }

    fn edge_count(&self) -> u64 {
        let d = self.degree;
        d * (d + 1) / 2 + (self.n - d - 1) * d
    }

    fn load_chunk(&mut self, c: u64) {
        let (lo, hi) = chunk_bounds(self.n, self.chunks, c);
        let mut adjacency = vec![Vec::new(); (hi - lo) as usize];
        replay(self.n, self.degree, self.seed, |u, v| {
            if (lo..hi).contains(&u) {
                adjacency[(u - lo) as usize].push(v);
            }
            if (lo..hi).contains(&v) {
                adjacency[(v - lo) as usize].push(u);
            }
        });
        for list in &mut adjacency {
            list.sort_unstable();
        }
        self.lo = lo;
        self.adjacency = adjacency;
        self.cursor = 0;
    }
}

/// Runs the attachment process, reporting every edge once.
fn replay(n: u64, d: u64, seed: u64, mut edge: impl FnMut(NodeId, NodeId)) {
    let core = (d + 1).min(n);
    let mut weights = Fenwick::new(n as usize);
    for u in 0..core {
        for v in (u + 1)..core {
            edge(u, v);
        }
        weights.add(u as usize, d);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut targets: Vec<NodeId> = Vec::with_capacity(d as usize);
    for v in core..n {
        targets.clear();
        let total = weights.total();
        while (targets.len() as u64) < d {
            let t = weights.find(rng.random_range(0..total)) as NodeId;
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edge(t, v);
            weights.add(t as usize, 1);
        }
        weights.add(v as usize, d);
    }
}

struct Fenwick {
    tree: Vec<u64>,
    total: u64,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self {
            tree: vec![0; n + 1],
            total: 0,
        }
    }

    fn add(&mut self, i: usize, delta: u64) {
        self.total += delta;
        let mut i = i + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    fn total(&self) -> u64 {
        self.total
    }

    /// Smallest index whose inclusive prefix sum exceeds `target`.
    fn find(&self, mut target: u64) -> usize {
        let mut pos = 0;
        let mut step = (self.tree.len() - 1).next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                target -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        pos
    }
}

impl Iterator for BaStream {
    type Item = Result<NodeRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.cursor == self.adjacency.len() {
            if self.chunk == self.chunks {
                return None;
            }
            let c = self.chunk;
            self.chunk += 1;
            self.load_chunk(c);
        }
        let id = self.lo + self.cursor as u64;
        let neighbors = std::mem::take(&mut self.adjacency[self.cursor]);
        self.cursor += 1;
        Some(Ok(NodeRecord { id, neighbors }))
    }
}

impl NodeStream for BaStream {
    fn header(&self) -> GraphHeader {
        GraphHeader {
            n: self.n,
            m: self.edge_count(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fenwick_find_matches_linear_scan() {
        let w = [3u64, 0, 5, 1, 0, 2];
        let mut f = Fenwick::new(w.len());
        for (i, &x) in w.iter().enumerate() {
            f.add(i, x);
        }
        for target in 0..f.total() {
            let mut acc = 0;
            let expect = w
                .iter()
                .position(|&x| {
                    acc += x;
                    acc > target
                })
                .unwrap();
            assert_eq!(f.find(target), expect, "target {target}");
        }
    }
}
