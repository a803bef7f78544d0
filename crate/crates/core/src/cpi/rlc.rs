use super::{head_width, AssignmentIndex};
use crate::bitvec::{PackedArray, PlaBitVector, PlaConfig};
use crate::graph_io::BlockId;

/// Run-length compressed sequence of block ids.
///
/// `heads[r]` is the value of the `r`-th run and `starts` carries a one at
/// the first index of every run, so element `i` is `heads[rank1(i) - 1]`.
#[derive(Debug, Clone)]
pub struct RlcVector {
    heads: PackedArray,
    starts: PlaBitVector,
    last: Option<BlockId>,
}

impl RlcVector {
    /// `k` bounds the stored values and sets the head width.
    pub fn new(k: Option<u32>, config: PlaConfig) -> Self {
        Self {
            heads: PackedArray::new(head_width(k)),
            starts: PlaBitVector::new(config),
            last: None,
        }
    }

    pub fn starts(&self) -> &PlaBitVector {
        &self.starts
    }

    /// Value and length of every run, in order.
    pub fn runs(&self) -> Vec<(BlockId, u64)> {
        let r = self.heads.len();
        (0..r)
            .map(|x| {
                let start = self.starts.select1(x + 1).unwrap();
                let end = self.starts.select1(x + 2).unwrap_or(self.starts.len());
                (self.heads.get(x).unwrap() as BlockId, end - start)
            })
            .collect()
    }

    /// Compresses buffered run starts and releases spare capacity.
    pub fn flush(&mut self) {
        self.starts.flush();
        self.starts.shrink_to_fit();
        self.heads.shrink_to_fit();
    }
}

impl AssignmentIndex for RlcVector {
    fn append(&mut self, block: BlockId) {
        if self.last == Some(block) {
            self.starts.push(false);
        } else {
            self.heads.push(block as u64);
            self.starts.push(true);
            self.last = Some(block);
        }
    }

    #[inline]
    fn get(&self, i: u64) -> Option<BlockId> {
        if i + 1 == self.starts.len() {
            return self.last;
        }
        let rank = self.starts.rank1(i)?;
        self.heads.get(rank - 1).map(|b| b as BlockId)
    }

    fn len(&self) -> u64 {
        self.starts.len()
    }

    fn run_count(&self) -> u64 {
        self.heads.len()
    }

    fn size_in_bytes(&self) -> usize {
        std::mem::size_of::<Self>()
            - std::mem::size_of::<PackedArray>()
            - std::mem::size_of::<PlaBitVector>()
            + self.heads.size_in_bytes()
            + self.starts.size_in_bytes()
    }
}
