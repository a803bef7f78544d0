//! Partition quality, memory accounting, and report serialization.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extpq::PqStats;
use crate::graph_io::{open_metis_stream, read_partition, BlockId, InMemoryGraph, NodeStream};

/// Outcome of one streaming run. Block assignments go to the caller's sink.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionResult {
    pub n: u64,
    pub m: u64,
    pub k: u32,
    pub epsilon: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub backend: String,
    pub beta: Option<u64>,
    pub delta: Option<usize>,
    pub correction_bits: Option<u32>,
    pub block_weights: Vec<u64>,
    pub edge_cut: u64,
    pub rel_cut: f64,
    pub run_count: u64,
    /// Bytes held by the assignment backend; for the external queue, its
    /// peak in-memory footprint.
    pub index_bytes: u64,
    /// Peak of backend plus partitioner-owned structures.
    pub peak_tracked_bytes: u64,
    pub elapsed_seconds: f64,
    #[serde(skip)]
    pub queue: Option<PqStats>,
}

impl PartitionResult {
    pub fn max_block_weight(&self) -> u64 {
        self.block_weights.iter().copied().max().unwrap_or(0)
    }

    pub fn imbalance(&self) -> f64 {
        imbalance(&self.block_weights, self.n, self.k)
    }
}

/// Serialized run report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub graph: String,
    pub n: u64,
    pub m: u64,
    pub k: u32,
    pub epsilon: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub backend: String,
    pub beta: Option<u64>,
    pub delta: Option<usize>,
    pub edge_cut: u64,
    pub rel_cut: f64,
    pub run_count: u64,
    pub index_bytes: u64,
    pub peak_tracked_bytes: u64,
    pub elapsed_seconds: f64,
    pub block_weights: Vec<u64>,
}

impl Report {
    pub fn new(graph: impl Into<String>, r: &PartitionResult) -> Self {
        Self {
            graph: graph.into(),
            n: r.n,
            m: r.m,
            k: r.k,
            epsilon: r.epsilon,
            gamma: r.gamma,
            kappa: r.kappa,
            backend: r.backend.clone(),
            beta: r.beta,
            delta: r.delta,
            edge_cut: r.edge_cut,
            rel_cut: r.rel_cut,
            run_count: r.run_count,
            index_bytes: r.index_bytes,
            peak_tracked_bytes: r.peak_tracked_bytes,
            elapsed_seconds: r.elapsed_seconds,
            block_weights: r.block_weights.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(format!("invalid report: {e}")))
    }

    /// One `key=value` pair per line, in JSON field order.
    pub fn to_key_value(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut out = String::new();
        if let serde_json::Value::Object(map) = value {
            for (key, v) in map {
                let text = match v {
                    serde_json::Value::String(s) => s,
                    serde_json::Value::Null => "none".to_string(),
                    serde_json::Value::Array(items) => items
                        .iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(","),
                    other => other.to_string(),
                };
                let _ = writeln!(out, "{key}={text}");
            }
        }
        out
    }
}

/// `max_i w_i / (n / k) - 1`.
pub fn imbalance(block_weights: &[u64], n: u64, k: u32) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let max = block_weights.iter().copied().max().unwrap_or(0);
    max as f64 / (n as f64 / k as f64) - 1.0
}

fn check_partition(parts: &[BlockId], n: u64, k: Option<u32>) -> Result<()> {
    if parts.len() as u64 != n {
        return Err(Error::PartitionLength {
            expected: n,
            found: parts.len() as u64,
        });
    }
    if let Some(k) = k {
        if let Some((node, &block)) = parts.iter().enumerate().find(|(_, &b)| b >= k) {
            return Err(Error::BlockOutOfRange {
                node: node as u64,
                block,
                k,
            });
        }
    }
    Ok(())
}

/// Counts each undirected cut edge once by rescanning a stream.
pub fn cut_from_stream<S: NodeStream>(stream: S, parts: &[BlockId]) -> Result<(u64, u64)> {
    let header = stream.header();
    check_partition(parts, header.n, None)?;
    let mut cut = 0u64;
    for rec in stream {
        let rec = rec?;
        let b = parts[rec.id as usize];
        cut += rec
            .neighbors
            .iter()
            .filter(|&&w| w < rec.id && parts[w as usize] != b)
            .count() as u64;
    }
    Ok((cut, header.m))
}

/// Offline `(edge_cut, rel_cut)` of a METIS graph and a partition file.
pub fn compute_cut_offline(
    graph: impl AsRef<Path>,
    partition: impl AsRef<Path>,
) -> Result<(u64, f64)> {
    let parts = read_partition(partition)?;
    let (cut, m) = cut_from_stream(open_metis_stream(graph)?, &parts)?;
    Ok((cut, rel(cut, m)))
}

fn rel(cut: u64, m: u64) -> f64 {
    if m == 0 {
        0.0
    } else {
        cut as f64 / m as f64
    }
}

/// In-memory cut, parallel over nodes when the `parallel` feature is on.
pub fn edge_cut(graph: &InMemoryGraph, parts: &[BlockId]) -> Result<u64> {
    check_partition(parts, graph.header().n, None)?;
    let per_node = |v: u64| -> u64 {
        let b = parts[v as usize];
        graph
            .neighbors(v)
            .iter()
            .filter(|&&w| w < v && parts[w as usize] != b)
            .count() as u64
    };
    let n = graph.header().n;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok((0..n).into_par_iter().map(per_node).sum())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok((0..n).map(per_node).sum())
    }
}

/// Block sizes of a partition vector.
pub fn block_weights(parts: &[BlockId], k: u32) -> Result<Vec<u64>> {
    check_partition(parts, parts.len() as u64, Some(k))?;
    let mut w = vec![0u64; k as usize];
    for &b in parts {
        w[b as usize] += 1;
    }
    Ok(w)
}

/// `a / b`, treating `0 / 0` as 1.
pub fn relative(a: f64, b: f64) -> f64 {
    if a == b {
        1.0
    } else {
        a / b
    }
}

/// `(a / b - 1) * 100`.
pub fn improvement_percent(relative: f64) -> f64 {
    (relative - 1.0) * 100.0
}

pub fn geometric_mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    (values.iter().map(|v| v.ln()).sum::<f64>() / values.len() as f64).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricComparison {
    pub metric: &'static str,
    pub relative: f64,
    pub improvement_percent: f64,
}

const COMPARED: [&str; 5] = [
    "edge_cut",
    "run_count",
    "index_bytes",
    "peak_tracked_bytes",
    "elapsed_seconds",
];

fn metric(r: &PartitionResult, name: &str) -> f64 {
    match name {
        "edge_cut" => r.edge_cut as f64,
        "run_count" => r.run_count as f64,
        "index_bytes" => r.index_bytes as f64,
        "peak_tracked_bytes" => r.peak_tracked_bytes as f64,
        "elapsed_seconds" => r.elapsed_seconds,
        _ => unreachable!("unknown metric {name}"),
    }
}

/// Per-metric `a / b` for two runs on the same instance.
pub fn compare_runs(a: &PartitionResult, b: &PartitionResult) -> Vec<MetricComparison> {
    COMPARED
        .iter()
        .map(|&name| {
            let r = relative(metric(a, name), metric(b, name));
            MetricComparison {
                metric: name,
                relative: r,
                improvement_percent: improvement_percent(r),
            }
        })
        .collect()
}

/// Geometric mean of per-instance relative values across paired runs.
pub fn compare_sets(a: &[PartitionResult], b: &[PartitionResult]) -> Result<Vec<MetricComparison>> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Config(format!(
            "cannot compare {} runs against {}",
            a.len(),
            b.len()
        )));
    }
    Ok(COMPARED
        .iter()
        .map(|&name| {
            let rels: Vec<f64> = a
                .iter()
                .zip(b)
                .map(|(x, y)| relative(metric(x, name), metric(y, name)))
                .collect();
            let g = geometric_mean(&rels);
            MetricComparison {
                metric: name,
                relative: g,
                improvement_percent: improvement_percent(g),
            }
        })
        .collect())
}
