//! Synthetic node streams generated chunk by chunk.
//!
//! Both models emit full neighborhoods in increasing id order while keeping
//! only one chunk of adjacency lists resident. Given the same [`GenConfig`]
//! the emitted stream is identical across runs.

mod ba;
mod rgg;

pub use ba::BaStream;
pub use rgg::RggStream;

use std::f64::consts::PI;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph_io::{GraphHeader, NodeRecord, NodeStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// Barabási-Albert preferential attachment.
    Ba,
    /// Random geometric graph in the unit square.
    Rgg,
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ba" => Ok(Model::Ba),
            "rgg" => Ok(Model::Rgg),
            other => Err(Error::Config(format!("unknown generator model {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub model: Model,
    pub n: u64,
    /// Edges attached by each new node (BA only).
    pub ba_degree: u64,
    /// Connection radius (RGG only).
    pub rgg_radius: f64,
    pub chunks: u64,
    pub seed: u64,
}

impl GenConfig {
    pub fn ba(n: u64, degree: u64, seed: u64) -> Self {
        Self {
            model: Model::Ba,
            n,
            ba_degree: degree,
            rgg_radius: 0.0,
            chunks: 4,
            seed,
        }
    }

    pub fn rgg(n: u64, radius: f64, seed: u64) -> Self {
        Self {
            model: Model::Rgg,
            n,
            ba_degree: 0,
            rgg_radius: radius,
            chunks: 16,
            seed,
        }
    }

    pub fn with_chunks(mut self, chunks: u64) -> Self {
        self.chunks = chunks;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("node count must be at least 1".into()));
        }
        if self.chunks == 0 {
            return Err(Error::Config("chunk count must be at least 1".into()));
        }
        match self.model {
            Model::Ba if self.ba_degree == 0 || self.ba_degree >= self.n => {
                Err(Error::Config(format!(
                    "BA degree must satisfy 1 <= degree < n (degree = {}, n = {})",
                    self.ba_degree, self.n
                )))
            }
            Model::Rgg if !(self.rgg_radius > 0.0 && self.rgg_radius.is_finite()) => {
                Err(Error::Config(format!(
                    "RGG radius must be positive, got {}",
                    self.rgg_radius
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Radius giving an expected average degree of `avg_degree` (ignoring
/// boundary effects).
pub fn rgg_radius_for_degree(n: u64, avg_degree: f64) -> f64 {
    (avg_degree / (PI * (n.saturating_sub(1)).max(1) as f64)).sqrt()
}

/// Expected RGG edge count `n(n-1)/2 * pi * r^2`, without boundary correction.
pub fn expected_rgg_edges(n: u64, r: f64) -> f64 {
    let n = n as f64;
    n * (n - 1.0) / 2.0 * PI * r * r
}

/// Coordinates of every RGG point in id order, for brute-force checks.
pub fn rgg_points(cfg: &GenConfig) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    if cfg.model != Model::Rgg {
        return Err(Error::Config("points exist only for the RGG model".into()));
    }
    Ok(rgg::points(cfg))
}

pub enum GeneratedStream {
    Ba(BaStream),
    Rgg(RggStream),
}

pub fn generate_stream(cfg: &GenConfig) -> Result<GeneratedStream> {
    cfg.validate()?;
    Ok(match cfg.model {
        Model::Ba => GeneratedStream::Ba(BaStream::new(cfg)),
        Model::Rgg => GeneratedStream::Rgg(RggStream::new(cfg)),
    })
}

impl Iterator for GeneratedStream {
    type Item = Result<NodeRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        match self {
            GeneratedStream::Ba(s) => s.next(),
            GeneratedStream::Rgg(s) => s.next(),
        }
    }
}

impl NodeStream for GeneratedStream {
    fn header(&self) -> GraphHeader {
        match self {
            GeneratedStream::Ba(s) => s.header(),
            GeneratedStream::Rgg(s) => s.header(),
        }
    }
}

/// Splits `0..n` into `chunks` contiguous ranges of near-equal size.
pub(crate) fn chunk_bounds(n: u64, chunks: u64, c: u64) -> (u64, u64) {
    let chunks = chunks.min(n).max(1);
    (n * c / chunks, n * (c + 1) / chunks)
}
