use super::packed::PackedBits;

pub const DEFAULT_CORRECTION_BITS: u32 = 8;
pub const DEFAULT_DELTA: usize = 1024;

/// Upper bound on ones per segment. Keeps the decode-and-rebuild work of a
/// flush proportional to `delta` rather than to the whole vector.
const MAX_SEGMENT_POINTS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlaConfig {
    /// Maximum correction width `c`; residuals satisfy `|r| < 2^(c-1)`.
    pub correction_bits: u32,
    /// Buffered one-positions before a flush.
    pub delta: usize,
}

impl Default for PlaConfig {
    fn default() -> Self {
        Self {
            correction_bits: DEFAULT_CORRECTION_BITS,
            delta: DEFAULT_DELTA,
        }
    }
}

impl PlaConfig {
    pub fn new(correction_bits: u32, delta: usize) -> Self {
        assert!(
            (2..=32).contains(&correction_bits),
            "correction bits must be in 2..=32, got {correction_bits}"
        );
        assert!(delta >= 1, "delta must be at least 1");
        Self {
            correction_bits,
            delta,
        }
    }

    fn max_error(&self) -> i64 {
        (1i64 << (self.correction_bits - 1)) - 1
    }
}

/// One linear piece: the `j`-th one of the segment sits at
/// `first_pos + round(slope * j) + correction[j]`.
#[derive(Debug, Clone, Copy)]
struct Segment {
    first_rank: u64,
    first_pos: u64,
    slope: f64,
    /// Bit offset of this segment's corrections.
    offset: u64,
    width: u32,
}

impl Segment {
    #[inline]
    fn predict(&self, j: u64) -> i64 {
        self.first_pos as i64 + (self.slope * j as f64).round() as i64
    }
}

/// Compressed bit vector storing the positions of its ones as a piecewise
/// linear approximation with bounded corrections, with append support.
///
/// New one-positions land in a tail buffer. When the buffer holds `delta`
/// entries, the last segment is decoded, merged with the buffer, and the
/// combined points are re-segmented greedily. Earlier segments never change.
#[derive(Debug, Clone)]
pub struct PlaBitVector {
    config: PlaConfig,
    segments: Vec<Segment>,
    corrections: PackedBits,
    compressed_ones: u64,
    tail: Vec<u64>,
    len: u64,
}

impl Default for PlaBitVector {
    fn default() -> Self {
        Self::new(PlaConfig::default())
    }
}

impl PlaBitVector {
    pub fn new(config: PlaConfig) -> Self {
        Self {
            config,
            segments: Vec::new(),
            corrections: PackedBits::new(),
            compressed_ones: 0,
            tail: Vec::new(),
            len: 0,
        }
    }

    pub fn config(&self) -> PlaConfig {
        self.config
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_ones(&self) -> u64 {
        self.compressed_ones + self.tail.len() as u64
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    pub fn buffered(&self) -> usize {
        self.tail.len()
    }

    pub fn push(&mut self, bit: bool) {
        if bit {
            self.tail.push(self.len);
        }
        self.len += 1;
        if self.tail.len() >= self.config.delta {
            self.flush();
        }
    }

    /// Appends `count` zero bits.
    pub fn push_zeros(&mut self, count: u64) {
        self.len += count;
    }

    /// Compresses the tail buffer into segments.
    pub fn flush(&mut self) {
        if self.tail.is_empty() {
            return;
        }
        let mut points = Vec::with_capacity(self.tail.len() + 64);
        let reopen = match self.segments.last() {
            Some(_) => self.segment_len(self.segments.len() - 1) < MAX_SEGMENT_POINTS as u64,
            None => false,
        };
        let first_rank = match reopen.then(|| self.segments.pop()).flatten() {
            Some(last) => {
                let count = self.compressed_ones - last.first_rank;
                points.extend((0..count).map(|j| self.decode(&last, j)));
                self.corrections.truncate(last.offset);
                self.compressed_ones = last.first_rank;
                last.first_rank
            }
            None => self.compressed_ones,
        };
        points.extend_from_slice(&self.tail);
        self.tail.clear();
        self.build_segments(first_rank, &points);
    }

    /// Releases spare capacity, e.g. once no more appends will arrive.
    pub fn shrink_to_fit(&mut self) {
        self.segments.shrink_to_fit();
        self.corrections.shrink_to_fit();
        self.tail.shrink_to_fit();
    }

    fn build_segments(&mut self, first_rank: u64, points: &[u64]) {
        let max_err = self.config.max_error();
        let mut start = 0;
        let mut residuals = Vec::new();
        while start < points.len() {
            let anchor = points[start];
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            let mut end = start + 1;
            while end < points.len() && end - start < MAX_SEGMENT_POINTS {
                let dx = (end - start) as f64;
                let dy = (points[end] - anchor) as f64;
                let nlo = lo.max((dy - max_err as f64) / dx);
                let nhi = hi.min((dy + max_err as f64) / dx);
                if nlo > nhi {
                    break;
                }
                lo = nlo;
                hi = nhi;
                end += 1;
            }
            let slope = if end - start == 1 {
                1.0
            } else {
                0.5 * (lo + hi)
            };
            let mut seg = Segment {
                first_rank: first_rank + start as u64,
                first_pos: anchor,
                slope,
                offset: self.corrections.bit_len(),
                width: 0,
            };
            residuals.clear();
            let mut max_abs = 0i64;
            for (j, &p) in points[start..end].iter().enumerate() {
                let r = p as i64 - seg.predict(j as u64);
                if r.abs() > max_err {
                    // rounding pushed this point outside the bound; end the piece here
                    break;
                }
                max_abs = max_abs.max(r.abs());
                residuals.push(r);
            }
            end = start + residuals.len();
            seg.width = if max_abs == 0 {
                0
            } else {
                64 - (max_abs as u64).leading_zeros() + 1
            };
            assert!(seg.width <= self.config.correction_bits);
            let bias = if seg.width == 0 {
                0
            } else {
                1i64 << (seg.width - 1)
            };
            for &r in &residuals {
                debug_assert!(r.abs() < bias.max(1));
                self.corrections.push((r + bias) as u64, seg.width);
            }
            self.segments.push(seg);
            self.compressed_ones += residuals.len() as u64;
            start = end;
        }
    }

    #[inline]
    fn decode(&self, seg: &Segment, j: u64) -> u64 {
        let bias = if seg.width == 0 {
            0
        } else {
            1i64 << (seg.width - 1)
        };
        let raw = self
            .corrections
            .get(seg.offset + j * seg.width as u64, seg.width) as i64;
        (seg.predict(j) + raw - bias) as u64
    }

    fn segment_len(&self, s: usize) -> u64 {
        let end = self
            .segments
            .get(s + 1)
            .map_or(self.compressed_ones, |n| n.first_rank);
        end - self.segments[s].first_rank
    }

    /// Number of ones at positions `<= i`.
    pub fn rank1(&self, i: u64) -> Option<u64> {
        if i >= self.len {
            return None;
        }
        if let Some(&first) = self.tail.first() {
            if first <= i {
                let in_tail = self.tail.partition_point(|&p| p <= i) as u64;
                return Some(self.compressed_ones + in_tail);
            }
        }
        let s = self.segments.partition_point(|seg| seg.first_pos <= i);
        if s == 0 {
            return Some(0);
        }
        let s = s - 1;
        let seg = &self.segments[s];
        let len = self.segment_len(s);
        // Largest local index j with position(j) <= i, found by galloping
        // outward from the linear estimate.
        let estimate = if seg.slope > 0.0 {
            ((i - seg.first_pos) as f64 / seg.slope) as u64
        } else {
            0
        };
        let guess = estimate.min(len - 1);
        let (mut lo, mut hi) = if self.decode(seg, guess) <= i {
            // position(lo) <= i; search for the first index beyond
            let mut step = 1;
            let mut lo = guess;
            loop {
                let probe = lo + step;
                if probe >= len {
                    break (lo, len);
                }
                if self.decode(seg, probe) > i {
                    break (lo, probe);
                }
                lo = probe;
                step *= 2;
            }
        } else {
            let mut step = 1;
            let mut hi = guess;
            loop {
                let probe = hi.saturating_sub(step);
                if self.decode(seg, probe) <= i {
                    break (probe, hi);
                }
                // position(0) == first_pos <= i, so probe 0 always terminates
                hi = probe;
                step *= 2;
            }
        };
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.decode(seg, mid) <= i {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(seg.first_rank + lo + 1)
    }

    /// Position of the `x`-th one (1-based).
    pub fn select1(&self, x: u64) -> Option<u64> {
        if x == 0 || x > self.count_ones() {
            return None;
        }
        let idx = x - 1;
        if idx >= self.compressed_ones {
            return Some(self.tail[(idx - self.compressed_ones) as usize]);
        }
        let s = self.segments.partition_point(|seg| seg.first_rank <= idx) - 1;
        let seg = &self.segments[s];
        Some(self.decode(seg, idx - seg.first_rank))
    }

    pub fn get(&self, i: u64) -> Option<bool> {
        let r = self.rank1(i)?;
        Some(r > 0 && self.select1(r) == Some(i))
    }

    pub fn size_in_bytes(&self) -> usize {
        std::mem::size_of::<Self>() - std::mem::size_of::<PackedBits>()
            + self.segments.capacity() * std::mem::size_of::<Segment>()
            + self.corrections.size_in_bytes()
            + self.tail.capacity() * std::mem::size_of::<u64>()
    }

    /// Checks the stored-correction bound for every compressed one.
    #[cfg(test)]
    fn check_corrections(&self) {
        for (s, seg) in self.segments.iter().enumerate() {
            let bound = if seg.width == 0 {
                1
            } else {
                1i64 << (seg.width - 1)
            };
            assert!(seg.width <= self.config.correction_bits);
            for j in 0..self.segment_len(s) {
                let pos = self.decode(seg, j) as i64;
                assert!((pos - seg.predict(j)).abs() < bound);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitvec::RankBitVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const EXAMPLE: [u8; 10] = [1, 0, 0, 0, 1, 0, 1, 0, 1, 1];

    fn build(bits: &[bool], config: PlaConfig) -> PlaBitVector {
        let mut v = PlaBitVector::new(config);
        for &b in bits {
            v.push(b);
        }
        v
    }

    #[test]
    fn single_one() {
        let mut v = PlaBitVector::default();
        v.push(true);
        assert_eq!(v.rank1(0), Some(1));
        assert_eq!(v.rank1(1), None);
    }

    #[test]
    fn example_sequence() {
        for delta in [1, 2, 16] {
            let bits = EXAMPLE.map(|b| b == 1);
            let v = build(&bits, PlaConfig::new(8, delta));
            assert_eq!(v.count_ones(), 5);
            assert_eq!(v.rank1(6), Some(3));
            assert_eq!(v.select1(1), Some(0));
            assert_eq!(v.select1(3), Some(6));
            assert_eq!(v.select1(5), Some(9));
            assert_eq!(v.select1(0), None);
            assert_eq!(v.select1(6), None);
            let ones: Vec<bool> = (0..10).map(|i| v.get(i).unwrap()).collect();
            assert_eq!(ones, bits);
        }
    }

    #[test]
    fn flush_empties_tail() {
        let mut v = PlaBitVector::new(PlaConfig::new(8, 1000));
        for i in 0..500 {
            v.push(i % 3 == 0);
        }
        assert!(v.buffered() > 0);
        v.flush();
        assert_eq!(v.buffered(), 0);
        assert_eq!(v.count_ones(), 167);
        v.check_corrections();
    }

    #[test]
    fn sparse_vector_is_smaller_than_plain() {
        let mut pla = PlaBitVector::default();
        let mut plain = RankBitVector::new();
        for i in 0..1_000_000u64 {
            pla.push(i == 123_456);
            plain.push(i == 123_456);
        }
        assert!(plain.size_in_bytes() >= 125_000);
        assert!(pla.size_in_bytes() < plain.size_in_bytes());
        assert_eq!(pla.rank1(999_999), Some(1));
        assert_eq!(pla.select1(1), Some(123_456));
    }

    #[test]
    fn empty_size_is_stable() {
        let v = PlaBitVector::default();
        assert_eq!(v.size_in_bytes(), PlaBitVector::default().size_in_bytes());
        assert_eq!(v.size_in_bytes(), v.size_in_bytes());
    }

    #[test]
    fn size_nondecreasing_between_flushes() {
        let mut v = PlaBitVector::new(PlaConfig::new(8, 64));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut last = v.size_in_bytes();
        for _ in 0..10_000 {
            let will_flush = v.buffered() + 1 >= 64;
            let bit = rng.random_bool(0.2);
            v.push(bit);
            let now = v.size_in_bytes();
            if !(bit && will_flush) {
                assert!(now >= last);
            }
            last = now;
        }
    }

    #[test]
    fn random_matches_naive_for_all_widths() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for c in [4, 8, 12] {
            for delta in [1, 16, 1024] {
                let len = 20_000;
                let density = [0.001, 0.05, 0.5][rng.random_range(0..3)];
                let bits: Vec<bool> = (0..len).map(|_| rng.random_bool(density)).collect();
                let v = build(&bits, PlaConfig::new(c, delta));
                v.check_corrections();
                let mut count = 0;
                for (i, &b) in bits.iter().enumerate() {
                    count += b as u64;
                    assert_eq!(v.rank1(i as u64), Some(count), "c={c} delta={delta} i={i}");
                    if b {
                        assert_eq!(v.select1(count), Some(i as u64));
                    }
                }
            }
        }
    }

    #[test]
    fn irregular_gaps_stay_within_bound() {
        let mut v = PlaBitVector::new(PlaConfig::new(4, 4096));
        let mut pos = 0u64;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut expect = Vec::new();
        for _ in 0..3000 {
            let gap = if rng.random_bool(0.1) {
                rng.random_range(100..10_000)
            } else {
                rng.random_range(1..4)
            };
            v.push_zeros(gap - 1);
            v.push(true);
            pos += gap;
            expect.push(pos - 1);
        }
        v.flush();
        v.check_corrections();
        assert!(v.segment_count() > 1);
        for (x, &p) in expect.iter().enumerate() {
            assert_eq!(v.select1(x as u64 + 1), Some(p));
            assert_eq!(v.rank1(p), Some(x as u64 + 1));
        }
    }
}
