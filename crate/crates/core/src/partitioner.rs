//! One-pass Fennel partitioning over a pluggable assignment store.
//!
//! Each node is scored against the blocks with `gain - alpha * gamma *
//! |V_b|^(gamma - 1)`, where the gain counts already-streamed neighbors in
//! `b`. The score of the previous node's block is scaled by `kappa^sgn(S)`.
//! Blocks at `L_max` are never chosen; ties go to the lowest block id.

use std::collections::BTreeSet;
use std::time::Instant;

use crate::bitvec::PlaConfig;
use crate::cpi::{ArrayIndex, AssignmentIndex, BatchedRlcVector, RlcVector};
use crate::error::{Error, Result};
use crate::extpq::{ExtPq, ExtPqConfig, PqEntry, PqStats};
use crate::graph_io::{AssignmentSink, BlockId, GraphHeader, NodeRecord, NodeStream};
use crate::metrics::PartitionResult;

pub const DEFAULT_EPSILON: f64 = 0.03;
pub const DEFAULT_GAMMA: f64 = 1.5;

/// User-facing partitioning knobs; see [`PartitionParams`] for derived values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionConfig {
    pub k: u32,
    pub epsilon: f64,
    pub gamma: f64,
    /// Run-elongation factor; 1 disables the modifier.
    pub kappa: f64,
}

impl PartitionConfig {
    pub fn new(k: u32) -> Self {
        Self {
            k,
            epsilon: DEFAULT_EPSILON,
            gamma: DEFAULT_GAMMA,
            kappa: 1.0,
        }
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionParams {
    pub k: u32,
    pub epsilon: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub n: u64,
    pub m: u64,
    /// `m * k^(gamma - 1) / n^gamma`.
    pub alpha: f64,
    /// `ceil((1 + epsilon) * n / k)`.
    pub l_max: u64,
}

/// Balance limit `ceil((1 + epsilon) * n / k)`.
pub fn max_block_weight(n: u64, k: u32, epsilon: f64) -> u64 {
    let bound = ((1.0 + epsilon) * n as f64 / k as f64).ceil() as u64;
    bound.max(n.div_ceil(k as u64))
}

impl PartitionParams {
    pub fn new(config: &PartitionConfig, header: GraphHeader) -> Result<Self> {
        let PartitionConfig {
            k,
            epsilon,
            gamma,
            kappa,
        } = *config;
        if k < 2 {
            return Err(Error::Config(format!("k must be at least 2, got {k}")));
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::Config(format!(
                "epsilon must be >= 0, got {epsilon}"
            )));
        }
        if !(gamma >= 1.0 && gamma.is_finite()) {
            return Err(Error::Config(format!("gamma must be >= 1, got {gamma}")));
        }
        if !(kappa >= 1.0 && kappa.is_finite()) {
            return Err(Error::Config(format!("kappa must be >= 1, got {kappa}")));
        }
        let GraphHeader { n, m } = header;
        let alpha = m as f64 * (k as f64).powf(gamma - 1.0) / (n as f64).powf(gamma);
        Ok(Self {
            k,
            epsilon,
            gamma,
            kappa,
            n,
            m,
            alpha,
            l_max: max_block_weight(n, k, epsilon),
        })
    }

    #[inline]
    pub fn penalty(&self, weight: u64) -> f64 {
        let w = weight as f64;
        let scaled = if self.gamma == 1.5 {
            w.sqrt()
        } else {
            w.powf(self.gamma - 1.0)
        };
        self.alpha * self.gamma * scaled
    }

    /// Whether heavier blocks are always penalized more.
    fn penalty_increasing(&self) -> bool {
        self.alpha > 0.0 && self.gamma > 1.0
    }
}

/// Fennel score of placing the current node into a block of `weight` nodes
/// that holds `gain` of its streamed neighbors.
#[inline]
pub fn fennel_score(params: &PartitionParams, weight: u64, gain: u32) -> f64 {
    gain as f64 - params.penalty(weight)
}

/// Scales the score of the previous node's block: positive scores are
/// multiplied by `kappa`, negative ones divided by it.
#[inline]
pub fn kappa_modify(score: f64, block: BlockId, prev: Option<BlockId>, kappa: f64) -> f64 {
    if prev != Some(block) {
        return score;
    }
    if score > 0.0 {
        score * kappa
    } else if score < 0.0 {
        score / kappa
    } else {
        score
    }
}

/// Stateless baseline: node `v` goes to block `v mod k`.
#[inline]
pub fn hashing_assign(v: u64, k: u32) -> BlockId {
    (v % k as u64) as BlockId
}

/// Where the partitioner reads neighbor assignments from and records new ones.
pub trait AssignmentStore {
    /// Appends the blocks of `rec`'s already-streamed neighbors to `out`.
    fn neighbor_blocks(&mut self, rec: &NodeRecord, out: &mut Vec<BlockId>) -> Result<()>;

    fn record(&mut self, rec: &NodeRecord, block: BlockId) -> Result<()>;

    /// Runs as seen by the store's own representation, if it has one.
    fn run_count(&self) -> Option<u64>;

    fn size_in_bytes(&self) -> usize;
}

/// Adapts an [`AssignmentIndex`] by querying it once per smaller neighbor.
pub struct IndexStore<I>(pub I);

impl<I: AssignmentIndex> AssignmentStore for IndexStore<I> {
    fn neighbor_blocks(&mut self, rec: &NodeRecord, out: &mut Vec<BlockId>) -> Result<()> {
        for &w in &rec.neighbors {
            if w < rec.id {
                let b = self.0.get(w).ok_or(Error::OutOfOrder {
                    expected: self.0.len(),
                    found: rec.id,
                })?;
                out.push(b);
            }
        }
        Ok(())
    }

    fn record(&mut self, _rec: &NodeRecord, block: BlockId) -> Result<()> {
        self.0.append(block);
        Ok(())
    }

    fn run_count(&self) -> Option<u64> {
        Some(self.0.run_count())
    }

    fn size_in_bytes(&self) -> usize {
        self.0.size_in_bytes()
    }
}

/// Time-forward processing through an external-memory queue.
pub struct ExtPqStore {
    queue: ExtPq,
}

impl ExtPqStore {
    pub fn new(config: ExtPqConfig) -> Result<Self> {
        Ok(Self {
            queue: ExtPq::new(config)?,
        })
    }

    pub fn queue(&self) -> &ExtPq {
        &self.queue
    }
}

impl AssignmentStore for ExtPqStore {
    fn neighbor_blocks(&mut self, rec: &NodeRecord, out: &mut Vec<BlockId>) -> Result<()> {
        let before = out.len();
        self.queue.extract_min_for(rec.id, out)?;
        let expected = rec.neighbors.iter().filter(|&&w| w < rec.id).count();
        if out.len() - before != expected {
            return Err(Error::Sequencing(format!(
                "node {} received {} assignments for {expected} smaller neighbors",
                rec.id,
                out.len() - before
            )));
        }
        Ok(())
    }

    fn record(&mut self, rec: &NodeRecord, block: BlockId) -> Result<()> {
        for &w in &rec.neighbors {
            if w > rec.id {
                self.queue.insert(PqEntry { target: w, block })?;
            }
        }
        Ok(())
    }

    fn run_count(&self) -> Option<u64> {
        None
    }

    fn size_in_bytes(&self) -> usize {
        self.queue.memory_bytes()
    }
}

/// How candidate blocks are enumerated for each node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScanMode {
    /// Only blocks holding neighbors, the previous block, and the best
    /// zero-gain block. Independent of `k` per node.
    #[default]
    Sparse,
    /// Every block, every node.
    Exhaustive,
}

pub struct FennelPartitioner<S> {
    params: PartitionParams,
    store: S,
    scan: ScanMode,
    weights: Vec<u64>,
    by_weight: BTreeSet<(u64, BlockId)>,
    gains: Vec<u32>,
    stamps: Vec<u32>,
    epoch: u32,
    touched: Vec<BlockId>,
    neighbor_buf: Vec<BlockId>,
    prev: Option<BlockId>,
    streamed: u64,
    edge_cut: u64,
    runs: u64,
}

impl<S: AssignmentStore> FennelPartitioner<S> {
    pub fn new(params: PartitionParams, store: S) -> Self {
        let k = params.k as usize;
        Self {
            params,
            store,
            scan: ScanMode::default(),
            weights: vec![0; k],
            by_weight: (0..params.k).map(|b| (0, b)).collect(),
            gains: vec![0; k],
            stamps: vec![0; k],
            epoch: 0,
            touched: Vec::new(),
            neighbor_buf: Vec::new(),
            prev: None,
            streamed: 0,
            edge_cut: 0,
            runs: 0,
        }
    }

    pub fn with_scan(mut self, scan: ScanMode) -> Self {
        self.scan = scan;
        self
    }

    pub fn params(&self) -> &PartitionParams {
        &self.params
    }

    pub fn block_weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn streamed(&self) -> u64 {
        self.streamed
    }

    pub fn edge_cut(&self) -> u64 {
        self.edge_cut
    }

    /// Runs in the emitted assignment sequence.
    pub fn runs(&self) -> u64 {
        self.runs
    }

    pub fn prev_block(&self) -> Option<BlockId> {
        self.prev
    }

    pub fn store(&self) -> &S {
        &self.store
    }

    pub fn into_store(self) -> S {
        self.store
    }

    /// Bytes of partitioner-owned state, excluding the store.
    pub fn state_bytes(&self) -> usize {
        let k = self.params.k as usize;
        std::mem::size_of::<Self>()
            + k * (std::mem::size_of::<u64>() + 2 * std::mem::size_of::<u32>())
            + self.by_weight.len() * std::mem::size_of::<(u64, BlockId)>()
            + (self.touched.capacity() + self.neighbor_buf.capacity())
                * std::mem::size_of::<BlockId>()
    }

    #[inline]
    fn gain(&self, b: BlockId) -> u32 {
        if self.stamps[b as usize] == self.epoch {
            self.gains[b as usize]
        } else {
            0
        }
    }

    #[inline]
    fn score(&self, b: BlockId) -> Option<f64> {
        let w = self.weights[b as usize];
        if w >= self.params.l_max {
            return None;
        }
        let s = fennel_score(&self.params, w, self.gain(b));
        Some(kappa_modify(s, b, self.prev, self.params.kappa))
    }

    /// Best block among those without streamed neighbors, excluding the
    /// previous block (which is always scored on its own).
    fn best_zero_gain(&self) -> Option<BlockId> {
        if self.params.penalty_increasing() {
            self.by_weight
                .iter()
                .take_while(|&&(w, _)| w < self.params.l_max)
                .find(|&&(_, b)| self.gain(b) == 0 && Some(b) != self.prev)
                .map(|&(_, b)| b)
        } else {
            (0..self.params.k).find(|&b| {
                self.weights[b as usize] < self.params.l_max
                    && self.gain(b) == 0
                    && Some(b) != self.prev
            })
        }
    }

    pub fn assign_node(&mut self, rec: &NodeRecord) -> Result<BlockId> {
        if rec.id != self.streamed {
            return Err(Error::OutOfOrder {
                expected: self.streamed,
                found: rec.id,
            });
        }
        let mut neighbors = std::mem::take(&mut self.neighbor_buf);
        neighbors.clear();
        self.store.neighbor_blocks(rec, &mut neighbors)?;

        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamps.fill(0);
            self.epoch = 1;
        }
        self.touched.clear();
        for &b in &neighbors {
            let i = b as usize;
            if self.stamps[i] != self.epoch {
                self.stamps[i] = self.epoch;
                self.gains[i] = 0;
                self.touched.push(b);
            }
            self.gains[i] += 1;
        }

        let mut best: Option<(f64, BlockId)> = None;
        let mut consider = |b: BlockId, score: Option<f64>| {
            if let Some(s) = score {
                let better = match best {
                    None => true,
                    Some((bs, bb)) => s > bs || (s == bs && b < bb),
                };
                if better {
                    best = Some((s, b));
                }
            }
        };
        match self.scan {
            ScanMode::Exhaustive => {
                for b in 0..self.params.k {
                    consider(b, self.score(b));
                }
            }
            ScanMode::Sparse => {
                for &b in &self.touched {
                    consider(b, self.score(b));
                }
                if let Some(p) = self.prev {
                    consider(p, self.score(p));
                }
                if let Some(z) = self.best_zero_gain() {
                    consider(z, self.score(z));
                }
            }
        }
        let (_, chosen) = best.ok_or(Error::Infeasible {
            k: self.params.k,
            l_max: self.params.l_max,
        })?;

        let w = &mut self.weights[chosen as usize];
        self.by_weight.remove(&(*w, chosen));
        *w += 1;
        self.by_weight.insert((*w, chosen));
        self.edge_cut += neighbors.len() as u64 - self.gain(chosen) as u64;
        if self.prev != Some(chosen) {
            self.runs += 1;
        }
        self.prev = Some(chosen);
        self.streamed += 1;
        self.store.record(rec, chosen)?;
        self.neighbor_buf = neighbors;
        Ok(chosen)
    }
}

/// Assignment storage used by [`run_partition`].
#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    Array,
    Cpi(PlaConfig),
    CpiBatch { beta: u64, pla: PlaConfig },
    ExtPq(ExtPqConfig),
    Hashing,
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Array => "array",
            Backend::Cpi(_) => "cpi",
            Backend::CpiBatch { .. } => "cpi-batch",
            Backend::ExtPq(_) => "extpq",
            Backend::Hashing => "hashing",
        }
    }

    pub fn beta(&self) -> Option<u64> {
        match self {
            Backend::CpiBatch { beta, .. } => Some(*beta),
            _ => None,
        }
    }

    pub fn pla(&self) -> Option<PlaConfig> {
        match self {
            Backend::Cpi(pla) | Backend::CpiBatch { pla, .. } => Some(*pla),
            _ => None,
        }
    }
}

const SIZE_SAMPLE_INTERVAL: u64 = 1024;

struct LoopOutcome {
    weights: Vec<u64>,
    edge_cut: u64,
    run_count: u64,
    index_bytes: usize,
    peak_tracked_bytes: usize,
    queue: Option<PqStats>,
}

fn drive<N, S, K>(
    stream: N,
    params: PartitionParams,
    store: S,
    scan: ScanMode,
    sink: &mut K,
) -> Result<(FennelPartitioner<S>, usize)>
where
    N: NodeStream,
    S: AssignmentStore,
    K: AssignmentSink,
{
    let mut part = FennelPartitioner::new(params, store).with_scan(scan);
    let mut peak = 0usize;
    for rec in stream {
        let rec = rec?;
        let b = part.assign_node(&rec)?;
        sink.push(b)?;
        if part.streamed().is_multiple_of(SIZE_SAMPLE_INTERVAL) {
            peak = peak.max(part.store().size_in_bytes() + part.state_bytes());
        }
    }
    if part.streamed() != params.n {
        return Err(Error::LineCount {
            expected: params.n,
            found: part.streamed(),
        });
    }
    peak = peak.max(part.store().size_in_bytes() + part.state_bytes());
    Ok((part, peak))
}

fn index_outcome<I: AssignmentIndex>(
    part: FennelPartitioner<IndexStore<I>>,
    peak: usize,
) -> LoopOutcome {
    LoopOutcome {
        weights: part.block_weights().to_vec(),
        edge_cut: part.edge_cut(),
        run_count: part.store().run_count().unwrap_or(part.runs()),
        index_bytes: part.store().size_in_bytes(),
        peak_tracked_bytes: peak,
        queue: None,
    }
}

fn hashing_loop<N: NodeStream, K: AssignmentSink>(
    stream: N,
    params: &PartitionParams,
    sink: &mut K,
) -> Result<LoopOutcome> {
    let k = params.k;
    let mut weights = vec![0u64; k as usize];
    let (mut edge_cut, mut runs, mut prev, mut streamed) = (0u64, 0u64, None, 0u64);
    for rec in stream {
        let rec = rec?;
        if rec.id != streamed {
            return Err(Error::OutOfOrder {
                expected: streamed,
                found: rec.id,
            });
        }
        let b = hashing_assign(rec.id, k);
        edge_cut += rec
            .neighbors
            .iter()
            .filter(|&&w| w < rec.id && hashing_assign(w, k) != b)
            .count() as u64;
        weights[b as usize] += 1;
        if prev != Some(b) {
            runs += 1;
        }
        prev = Some(b);
        streamed += 1;
        sink.push(b)?;
    }
    if streamed != params.n {
        return Err(Error::LineCount {
            expected: params.n,
            found: streamed,
        });
    }
    Ok(LoopOutcome {
        peak_tracked_bytes: weights.len() * std::mem::size_of::<u64>(),
        weights,
        edge_cut,
        run_count: runs,
        index_bytes: 0,
        queue: None,
    })
}

/// Streams every node once, assigning blocks and pushing them into `sink`.
pub fn run_partition<N, K>(
    stream: N,
    config: &PartitionConfig,
    backend: &Backend,
    sink: &mut K,
) -> Result<PartitionResult>
where
    N: NodeStream,
    K: AssignmentSink,
{
    run_partition_with(stream, config, backend, ScanMode::Sparse, sink)
}

pub fn run_partition_with<N, K>(
    stream: N,
    config: &PartitionConfig,
    backend: &Backend,
    scan: ScanMode,
    sink: &mut K,
) -> Result<PartitionResult>
where
    N: NodeStream,
    K: AssignmentSink,
{
    let start = Instant::now();
    let params = PartitionParams::new(config, stream.header())?;
    let k = Some(params.k);
    let out = match backend {
        Backend::Array => {
            let store = IndexStore(ArrayIndex::new());
            let (part, peak) = drive(stream, params, store, scan, sink)?;
            index_outcome(part, peak)
        }
        Backend::Cpi(pla) => {
            let store = IndexStore(RlcVector::new(k, *pla));
            let (part, peak) = drive(stream, params, store, scan, sink)?;
            index_outcome(part, peak)
        }
        Backend::CpiBatch { beta, pla } => {
            if *beta == 0 {
                return Err(Error::Config("batch size must be positive".into()));
            }
            let store = IndexStore(BatchedRlcVector::new(*beta, k, *pla));
            let (part, peak) = drive(stream, params, store, scan, sink)?;
            index_outcome(part, peak)
        }
        Backend::ExtPq(cfg) => {
            let store = ExtPqStore::new(cfg.clone())?;
            let (part, _) = drive(stream, params, store, scan, sink)?;
            let stats = part.store().queue().stats();
            LoopOutcome {
                weights: part.block_weights().to_vec(),
                edge_cut: part.edge_cut(),
                run_count: part.runs(),
                index_bytes: stats.peak_memory_bytes,
                peak_tracked_bytes: stats.peak_memory_bytes + part.state_bytes(),
                queue: Some(stats),
            }
        }
        Backend::Hashing => hashing_loop(stream, &params, sink)?,
    };
    let rel_cut = if params.m == 0 {
        0.0
    } else {
        out.edge_cut as f64 / params.m as f64
    };
    Ok(PartitionResult {
        n: params.n,
        m: params.m,
        k: params.k,
        epsilon: params.epsilon,
        gamma: params.gamma,
        kappa: params.kappa,
        backend: backend.name().to_string(),
        beta: backend.beta(),
        delta: backend.pla().map(|p| p.delta),
        correction_bits: backend.pla().map(|p| p.correction_bits),
        block_weights: out.weights,
        edge_cut: out.edge_cut,
        rel_cut,
        run_count: out.run_count,
        index_bytes: out.index_bytes as u64,
        peak_tracked_bytes: out.peak_tracked_bytes as u64,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        queue: out.queue,
    })
}
