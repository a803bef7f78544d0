const WORDS_PER_BLOCK: usize = 8;

/// Plain bit vector with a cumulative rank directory every 512 bits.
#[derive(Debug, Clone, Default)]
pub struct RankBitVector {
    words: Vec<u64>,
    /// Number of ones before each 512-bit superblock.
    directory: Vec<u64>,
    len: u64,
    ones: u64,
}

impl RankBitVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut v = Self::new();
        for b in bits {
            v.push(b);
        }
        v
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_ones(&self) -> u64 {
        self.ones
    }

    pub fn push(&mut self, bit: bool) {
        let word = (self.len / 64) as usize;
        if word == self.words.len() {
            if word.is_multiple_of(WORDS_PER_BLOCK) {
                self.directory.push(self.ones);
            }
            self.words.push(0);
        }
        if bit {
            self.words[word] |= 1 << (self.len % 64);
            self.ones += 1;
        }
        self.len += 1;
    }

    pub fn get(&self, i: u64) -> Option<bool> {
        (i < self.len).then(|| self.words[(i / 64) as usize] >> (i % 64) & 1 == 1)
    }

    /// Number of ones at positions `<= i`.
    pub fn rank1(&self, i: u64) -> Option<u64> {
        if i >= self.len {
            return None;
        }
        let word = (i / 64) as usize;
        let block = word / WORDS_PER_BLOCK;
        let mut count = self.directory[block];
        for w in &self.words[block * WORDS_PER_BLOCK..word] {
            count += w.count_ones() as u64;
        }
        let shift = i % 64;
        let mask = if shift == 63 {
            u64::MAX
        } else {
            (1u64 << (shift + 1)) - 1
        };
        count += (self.words[word] & mask).count_ones() as u64;
        Some(count)
    }

    /// Position of the `x`-th one (1-based).
    pub fn select1(&self, x: u64) -> Option<u64> {
        if x == 0 || x > self.ones {
            return None;
        }
        let block = self.directory.partition_point(|&c| c < x) - 1;
        let mut remaining = x - self.directory[block];
        let mut word = block * WORDS_PER_BLOCK;
        loop {
            let c = self.words[word].count_ones() as u64;
            if c >= remaining {
                break;
            }
            remaining -= c;
            word += 1;
        }
        let mut w = self.words[word];
        for _ in 1..remaining {
            w &= w - 1;
        }
        Some(word as u64 * 64 + w.trailing_zeros() as u64)
    }

    pub fn size_in_bytes(&self) -> usize {
        std::mem::size_of::<Self>()
            + self.words.capacity() * std::mem::size_of::<u64>()
            + self.directory.capacity() * std::mem::size_of::<u64>()
    }
}
