/// Append-only store of variable-width unsigned fields packed into `u64` words.
#[derive(Debug, Clone, Default)]
pub struct PackedBits {
    words: Vec<u64>,
    bit_len: u64,
}

impl PackedBits {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bit_len(&self) -> u64 {
        self.bit_len
    }

    /// Appends the low `width` bits of `value`.
    pub fn push(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        if width == 0 {
            return;
        }
        debug_assert!(
            width == 64 || value >> width == 0,
            "{value} does not fit in {width} bits"
        );
        let word = (self.bit_len / 64) as usize;
        let shift = (self.bit_len % 64) as u32;
        if word == self.words.len() {
            self.words.push(0);
        }
        self.words[word] |= value << shift;
        if shift + width > 64 {
            self.words.push(value >> (64 - shift));
        }
        self.bit_len += width as u64;
    }

    /// Reads `width` bits starting at bit `offset`.
    #[inline]
    pub fn get(&self, offset: u64, width: u32) -> u64 {
        if width == 0 {
            return 0;
        }
        debug_assert!(offset + width as u64 <= self.bit_len);
        let word = (offset / 64) as usize;
        let shift = (offset % 64) as u32;
        let mask = if width == 64 {
            u64::MAX
        } else {
            (1u64 << width) - 1
        };
        let mut v = self.words[word] >> shift;
        if shift + width > 64 {
            v |= self.words[word + 1] << (64 - shift);
        }
        v & mask
    }

    /// Drops every bit at or beyond `bit_len`.
    pub fn truncate(&mut self, bit_len: u64) {
        if bit_len >= self.bit_len {
            return;
        }
        self.bit_len = bit_len;
        let words = bit_len.div_ceil(64) as usize;
        self.words.truncate(words);
        let rem = (bit_len % 64) as u32;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn shrink_to_fit(&mut self) {
        self.words.shrink_to_fit();
    }

    pub fn size_in_bytes(&self) -> usize {
        std::mem::size_of::<Self>() + self.words.capacity() * std::mem::size_of::<u64>()
    }
}

/// Fixed-width packed array.
#[derive(Debug, Clone)]
pub struct PackedArray {
    bits: PackedBits,
    width: u32,
    len: u64,
}

impl PackedArray {
    pub fn new(width: u32) -> Self {
        assert!((1..=64).contains(&width), "width {width} out of range");
        Self {
            bits: PackedBits::new(),
            width,
            len: 0,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, value: u64) {
        assert!(
            self.width == 64 || value >> self.width == 0,
            "value {value} does not fit in {} bits",
            self.width
        );
        self.bits.push(value, self.width);
        self.len += 1;
    }

    #[inline]
    pub fn get(&self, i: u64) -> Option<u64> {
        (i < self.len).then(|| self.bits.get(i * self.width as u64, self.width))
    }

    pub fn shrink_to_fit(&mut self) {
        self.bits.shrink_to_fit();
    }

    pub fn size_in_bytes(&self) -> usize {
        std::mem::size_of::<Self>() - std::mem::size_of::<PackedBits>() + self.bits.size_in_bytes()
    }
}
