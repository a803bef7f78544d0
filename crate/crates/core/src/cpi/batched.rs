use super::{AssignmentIndex, RlcVector};
use crate::bitvec::PlaConfig;
use crate::graph_io::BlockId;

/// Element `v` lives in sub-vector `v / beta` at offset `v % beta`. Runs
/// never span a batch boundary.
#[derive(Debug, Clone)]
pub struct BatchedRlcVector {
    beta: u64,
    k: Option<u32>,
    config: PlaConfig,
    vectors: Vec<RlcVector>,
    len: u64,
}

impl BatchedRlcVector {
    pub fn new(beta: u64, k: Option<u32>, config: PlaConfig) -> Self {
        assert!(beta > 0, "batch size must be positive");
        Self {
            beta,
            k,
            config,
            vectors: Vec::new(),
            len: 0,
        }
    }

    pub fn beta(&self) -> u64 {
        self.beta
    }

    pub fn batches(&self) -> &[RlcVector] {
        &self.vectors
    }
}

impl AssignmentIndex for BatchedRlcVector {
    fn append(&mut self, block: BlockId) {
        if self.len.is_multiple_of(self.beta) {
            if let Some(full) = self.vectors.last_mut() {
                full.flush();
            }
            self.vectors.push(RlcVector::new(self.k, self.config));
        }
        self.vectors.last_mut().unwrap().append(block);
        self.len += 1;
    }

    #[inline]
    fn get(&self, i: u64) -> Option<BlockId> {
        if i >= self.len {
            return None;
        }
        self.vectors[(i / self.beta) as usize].get(i % self.beta)
    }

    fn len(&self) -> u64 {
        self.len
    }

    fn run_count(&self) -> u64 {
        self.vectors.iter().map(|v| v.run_count()).sum()
    }

    fn size_in_bytes(&self) -> usize {
        std::mem::size_of::<Self>()
            + (self.vectors.capacity() - self.vectors.len()) * std::mem::size_of::<RlcVector>()
            + self
                .vectors
                .iter()
                .map(|v| v.size_in_bytes())
                .sum::<usize>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_batch_opens_new_run() {
        let mut v = BatchedRlcVector::new(10, Some(2), PlaConfig::default());
        for _ in 0..100 {
            v.append(1);
        }
        assert_eq!(v.run_count(), 10);
        assert_eq!(v.batches().len(), 10);
        assert_eq!(v.get(57), Some(1));
        assert_eq!(v.get(100), None);
    }

    #[test]
    fn routes_by_batch() {
        let mut v = BatchedRlcVector::new(3, None, PlaConfig::default());
        let values = [5, 5, 6, 6, 6, 7, 1];
        for b in values {
            v.append(b);
        }
        for (i, &b) in values.iter().enumerate() {
            assert_eq!(v.get(i as u64), Some(b));
        }
        assert_eq!(v.batches()[1].run_count(), 2);
    }
}
