//! Assignment indexes: drop-in replacements for the length-n array of block
//! ids used by a streaming partitioner.
//!
//! All indexes are append-only in node-id order and answer random-access
//! queries over the appended prefix.

mod batched;
mod rlc;

pub use batched::BatchedRlcVector;
pub use rlc::RlcVector;

use crate::graph_io::BlockId;

pub trait AssignmentIndex {
    fn append(&mut self, block: BlockId);

    /// Block of element `i`, or `None` past the appended prefix.
    fn get(&self, i: u64) -> Option<BlockId>;

    fn len(&self) -> u64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn run_count(&self) -> u64;

    fn size_in_bytes(&self) -> usize;
}

/// Bits per run head: `ceil(log2 k)` when `k` is known, else 32.
pub fn head_width(k: Option<u32>) -> u32 {
    match k {
        Some(k) if k > 1 => 32 - (k - 1).leading_zeros(),
        Some(_) => 1,
        None => 32,
    }
}

/// Plain array backend.
#[derive(Debug, Clone, Default)]
pub struct ArrayIndex {
    blocks: Vec<BlockId>,
    runs: u64,
}

impl ArrayIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            blocks: Vec::with_capacity(n),
            runs: 0,
        }
    }

    pub fn as_slice(&self) -> &[BlockId] {
        &self.blocks
    }
}

impl AssignmentIndex for ArrayIndex {
    fn append(&mut self, block: BlockId) {
        if self.blocks.last() != Some(&block) {
            self.runs += 1;
        }
        self.blocks.push(block);
    }

    #[inline]
    fn get(&self, i: u64) -> Option<BlockId> {
        self.blocks.get(i as usize).copied()
    }

    fn len(&self) -> u64 {
        self.blocks.len() as u64
    }

    fn run_count(&self) -> u64 {
        self.runs
    }

    fn size_in_bytes(&self) -> usize {
        std::mem::size_of::<Self>() + self.blocks.capacity() * std::mem::size_of::<BlockId>()
    }
}
