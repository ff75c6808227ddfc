//! Packed bit vectors.
//!
//! Every secret, share component and wire value in this crate is a
//! [`BitVector`]: one bit per lane, packed into `u64` words. The byte
//! serialization is fixed: bit `j` lives in bit `j % 8` of byte `j / 8`
//! (least-significant bit first), which is exactly the little-endian byte
//! layout of the backing words.

use std::fmt;

use rand::{CryptoRng, Rng, RngCore};
use thiserror::Error;

const WORD_BITS: usize = 64;

/// Two bit vectors that must have the same length did not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("bit length mismatch: {left} vs {right}")]
pub struct LengthMismatch {
    pub left: usize,
    pub right: usize,
}

impl LengthMismatch {
    pub(crate) fn check(left: usize, right: usize) -> Result<(), Self> {
        if left == right {
            Ok(())
        } else {
            Err(Self { left, right })
        }
    }
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

impl BitVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            words: vec![u64::MAX; words_for(len)],
            len,
        };
        v.clear_tail();
        v
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(words_for(bits)),
            len: 0,
        }
    }

    /// Uniformly random bits.
    pub fn random<R: RngCore + CryptoRng>(rng: &mut R, len: usize) -> Self {
        let mut words = vec![0u64; words_for(len)];
        rng.fill(&mut words[..]);
        let mut v = Self { words, len };
        v.clear_tail();
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        v
    }

    /// Builds a vector of `len` bits from the LSB-first byte encoding.
    ///
    /// Returns `None` if `bytes` is not exactly `ceil(len / 8)` long.
    /// Padding bits in the last byte are ignored.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Option<Self> {
        if bytes.len() != len.div_ceil(8) {
            return None;
        }
        let mut words = vec![0u64; words_for(len)];
        for (w, chunk) in words.iter_mut().zip(bytes.chunks(8)) {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            *w = u64::from_le_bytes(buf);
        }
        let mut v = Self { words, len };
        v.clear_tail();
        Some(v)
    }

    /// All bits of `bytes`, LSB-first.
    pub fn from_byte_slice(bytes: &[u8]) -> Self {
        Self::from_bytes(bytes, bytes.len() * 8).expect("length is exact")
    }

    /// LSB-first encoding, `ceil(len / 8)` bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.len.div_ceil(8);
        let mut out = Vec::with_capacity(self.words.len() * 8);
        for w in &self.words {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out.truncate(n);
        out
    }

    pub fn from_words(words: Vec<u64>, len: usize) -> Self {
        assert!(words.len() == words_for(len), "word count does not match length");
        let mut v = Self { words, len };
        v.clear_tail();
        v
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if bit {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len % WORD_BITS == 0 {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, bit);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor(&self, other: &Self) -> Result<Self, LengthMismatch> {
        self.zip_with(other, |a, b| a ^ b)
    }

    pub fn and(&self, other: &Self) -> Result<Self, LengthMismatch> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn xor_assign(&mut self, other: &Self) -> Result<(), LengthMismatch> {
        LengthMismatch::check(self.len, other.len)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn not(&self) -> Self {
        let mut v = Self {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        v.clear_tail();
        v
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Result<Self, LengthMismatch> {
        LengthMismatch::check(self.len, other.len)?;
        Ok(Self {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            len: self.len,
        })
    }

    /// Appends all bits of `other`.
    pub fn append(&mut self, other: &Self) {
        self.append_range(other, 0, other.len);
    }

    /// Appends `count` bits of `src` starting at bit `start`.
    pub fn append_range(&mut self, src: &Self, start: usize, count: usize) {
        assert!(start + count <= src.len, "source range out of bounds");
        if count == 0 {
            return;
        }
        let shift = self.len % WORD_BITS;
        let new_len = self.len + count;
        self.words.reserve(words_for(new_len) - self.words.len());
        let mut remaining = count;
        let mut pos = start;
        // Pull the source 64 bits at a time and splice them at the tail.
        while remaining > 0 {
            let take = remaining.min(WORD_BITS);
            let chunk = src.read_word(pos, take);
            if shift == 0 {
                self.words.push(chunk);
            } else {
                let last = self.words.len() - 1;
                self.words[last] |= chunk << shift;
                if take > WORD_BITS - shift {
                    self.words.push(chunk >> (WORD_BITS - shift));
                }
            }
            pos += take;
            remaining -= take;
        }
        self.len = new_len;
        self.words.truncate(words_for(new_len));
        self.clear_tail();
    }

    /// `count` bits starting at `start`, as a new vector.
    pub fn slice(&self, start: usize, count: usize) -> Self {
        let mut out = Self::with_capacity(count);
        out.append_range(self, start, count);
        out
    }

    /// Up to 64 bits starting at `pos`, right-aligned, higher bits zero.
    fn read_word(&self, pos: usize, take: usize) -> u64 {
        debug_assert!(take >= 1 && take <= WORD_BITS);
        let idx = pos / WORD_BITS;
        let off = pos % WORD_BITS;
        let mut w = self.words[idx] >> off;
        if off != 0 && idx + 1 < self.words.len() {
            w |= self.words[idx + 1] << (WORD_BITS - off);
        }
        if take < WORD_BITS {
            w &= (1u64 << take) - 1;
        }
        w
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Concatenation of `parts` in order.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a BitVector>) -> Self {
        let mut out = Self::new();
        for p in parts {
            out.append(p);
        }
        out
    }

    /// Splits into `parts` consecutive chunks of `chunk_len` bits.
    pub fn chunks(&self, chunk_len: usize) -> Vec<BitVector> {
        assert!(chunk_len > 0 && self.len % chunk_len == 0, "length is not a multiple of the chunk size");
        (0..self.len / chunk_len)
            .map(|i| self.slice(i * chunk_len, chunk_len))
            .collect()
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector[{}](", self.len)?;
        for (i, b) in self.iter().take(128).enumerate() {
            if i > 0 && i % 8 == 0 {
                f.write_str("_")?;
            }
            f.write_str(if b { "1" } else { "0" })?;
        }
        if self.len > 128 {
            f.write_str("...")?;
        }
        f.write_str(")")
    }
}

impl FromIterator<bool> for BitVector {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut v = Self::new();
        for b in iter {
            v.push(b);
        }
        v
    }
}
