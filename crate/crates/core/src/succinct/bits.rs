//! Raw bit storage: an append-only bit buffer and a fixed-width packed
//! integer vector. Bit `p` of a stream lives in word `p / 64`, bit `p % 64`.

use crate::error::LoadError;
use crate::serial::{self, Decode, Encode, Reader};

/// Number of bits needed to write `v` in binary (0 for `v == 0`).
#[inline]
pub fn bit_len(v: u64) -> u32 {
    64 - v.leading_zeros()
}

/// ⌈log2 x⌉ for `x >= 1`, and 0 for `x <= 1`.
#[inline]
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        bit_len(x - 1)
    }
}

#[inline]
fn low_mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitBuf {
    words: Vec<u64>,
    len: usize,
}

impl BitBuf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeros(len: usize) -> Self {
        BitBuf {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / 64] |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    /// Appends the low `width` bits of `v`, least significant first.
    pub fn push_bits(&mut self, v: u64, width: u32) {
        if width == 0 {
            return;
        }
        let v = v & low_mask(width);
        let off = (self.len % 64) as u32;
        if off == 0 {
            self.words.push(v);
        } else {
            *self.words.last_mut().unwrap() |= v << off;
            if off + width > 64 {
                self.words.push(v >> (64 - off));
            }
        }
        self.len += width as usize;
    }

    pub fn set(&mut self, pos: usize, bit: bool) {
        debug_assert!(pos < self.len);
        let (w, b) = (pos / 64, pos % 64);
        if bit {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    #[inline]
    pub fn get(&self, pos: usize) -> bool {
        debug_assert!(pos < self.len);
        (self.words[pos / 64] >> (pos % 64)) & 1 == 1
    }

    /// Reads `width <= 64` bits starting at `pos`; bits past the end read as 0.
    #[inline]
    pub fn read_bits(&self, pos: usize, width: u32) -> u64 {
        if width == 0 {
            return 0;
        }
        let (w, off) = (pos / 64, (pos % 64) as u32);
        let lo = self.words.get(w).copied().unwrap_or(0) >> off;
        let v = if off + width > 64 {
            let hi = self.words.get(w + 1).copied().unwrap_or(0);
            lo | (hi << (64 - off))
        } else {
            lo
        };
        v & low_mask(width)
    }

    /// Number of zero bits before the next one bit at or after `pos`.
    #[inline]
    pub fn zeros_before_one(&self, pos: usize) -> u32 {
        let mut count = 0u32;
        let mut p = pos;
        loop {
            let chunk = self.read_bits(p, 64);
            if chunk != 0 {
                return count + chunk.trailing_zeros();
            }
            count += 64;
            p += 64;
            debug_assert!(p < self.len + 64, "unterminated unary code");
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn from_words(words: Vec<u64>, len: usize) -> Result<Self, LoadError> {
        if words.len() != len.div_ceil(64) {
            return Err(serial::malformed("bit buffer word count"));
        }
        Ok(BitBuf { words, len })
    }
}

impl Encode for BitBuf {
    fn encode(&self, out: &mut Vec<u8>) {
        serial::put_len(out, self.len);
        serial::put_words(out, &self.words);
    }
}

impl Decode for BitBuf {
    fn decode(r: &mut Reader<'_>) -> Result<Self, LoadError> {
        let len = r.len("bit buffer length")?;
        let words = r.words("bit buffer words")?;
        BitBuf::from_words(words, len)
    }
}

/// Packed array of unsigned integers, each stored in `width` bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntVec {
    bits: BitBuf,
    width: u32,
    len: usize,
}

impl IntVec {
    pub fn new(width: u32) -> Self {
        assert!(width <= 64);
        IntVec {
            bits: BitBuf::new(),
            width,
            len: 0,
        }
    }

    /// Packs `values` using the smallest width that holds the maximum.
    pub fn from_slice(values: &[u64]) -> Self {
        let width = values.iter().copied().max().map_or(0, bit_len);
        let mut v = IntVec::new(width);
        for &x in values {
            v.push(x);
        }
        v
    }

    pub fn from_usizes(values: &[usize]) -> Self {
        let width = values.iter().copied().max().map_or(0, |m| bit_len(m as u64));
        let mut v = IntVec::new(width);
        for &x in values {
            v.push(x as u64);
        }
        v
    }

    pub fn push(&mut self, v: u64) {
        debug_assert!(self.width == 64 || v >> self.width == 0);
        self.bits.push_bits(v, self.width);
        self.len += 1;
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        self.bits.read_bits(i * self.width as usize, self.width)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

impl Encode for IntVec {
    fn encode(&self, out: &mut Vec<u8>) {
        serial::put_u8(out, self.width as u8);
        serial::put_len(out, self.len);
        serial::put_words(out, self.bits.words());
    }
}

impl Decode for IntVec {
    fn decode(r: &mut Reader<'_>) -> Result<Self, LoadError> {
        let width = r.u8("int vector width")? as u32;
        if width > 64 {
            return Err(serial::malformed("int vector width"));
        }
        let len = r.len("int vector length")?;
        let words = r.words("int vector words")?;
        let nbits = len
            .checked_mul(width as usize)
            .ok_or_else(|| serial::malformed("int vector size"))?;
        let bits = BitBuf::from_words(words, nbits)?;
        Ok(IntVec { bits, width, len })
    }
}
