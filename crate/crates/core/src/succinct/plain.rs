use crate::error::LoadError;
use crate::serial::{self, Decode, Encode, Reader};

use super::bits::BitBuf;

const WORDS_PER_BLOCK: usize = 8;
const BLOCK_BITS: usize = 64 * WORDS_PER_BLOCK;

/// Uncompressed bitmap with a one-level rank directory (one cumulative
/// count per 512 bits). Select is a binary search over the directory
/// followed by a word scan.
///
/// Positions are 1-based: `rank1(i)` counts ones in `[1, i]` and
/// `select1(k)` returns the position of the k-th one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainBitmap {
    bits: BitBuf,
    blocks: Vec<u32>,
    ones: usize,
}

#[inline]
fn select_in_word(mut w: u64, mut k: u32) -> u32 {
    // k is 0-based
    while k > 0 {
        w &= w - 1;
        k -= 1;
    }
    w.trailing_zeros()
}

impl PlainBitmap {
    pub fn new(bits: BitBuf) -> Self {
        assert!(bits.len() < u32::MAX as usize, "plain bitmap too long");
        let mut blocks = Vec::with_capacity(bits.len() / BLOCK_BITS + 1);
        let mut acc = 0u32;
        for (i, w) in bits.words().iter().enumerate() {
            if i % WORDS_PER_BLOCK == 0 {
                blocks.push(acc);
            }
            acc += w.count_ones();
        }
        blocks.push(acc);
        PlainBitmap {
            bits,
            blocks,
            ones: acc as usize,
        }
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut b = BitBuf::new();
        for bit in bits {
            b.push(bit);
        }
        Self::new(b)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.ones
    }

    pub fn count_zeros(&self) -> usize {
        self.len() - self.ones
    }

    /// Bit at 1-based position `pos`.
    #[inline]
    pub fn get(&self, pos: usize) -> bool {
        debug_assert!(pos >= 1 && pos <= self.len());
        self.bits.get(pos - 1)
    }

    #[inline]
    pub fn rank1(&self, i: usize) -> usize {
        debug_assert!(i <= self.len());
        let word = i / 64;
        let block = word / WORDS_PER_BLOCK;
        let mut r = self.blocks[block] as usize;
        let words = self.bits.words();
        for w in &words[block * WORDS_PER_BLOCK..word] {
            r += w.count_ones() as usize;
        }
        let rem = i % 64;
        if rem > 0 {
            r += (words[word] & ((1u64 << rem) - 1)).count_ones() as usize;
        }
        r
    }

    #[inline]
    pub fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }

    #[inline]
    pub fn rank(&self, bit: bool, i: usize) -> usize {
        if bit {
            self.rank1(i)
        } else {
            self.rank0(i)
        }
    }

    /// Position of the k-th one, `1 <= k <= count_ones()`.
    pub fn select1(&self, k: usize) -> usize {
        debug_assert!(k >= 1 && k <= self.ones);
        // last block whose cumulative count is < k
        let block = self.blocks.partition_point(|&c| (c as usize) < k) - 1;
        let mut remaining = k - self.blocks[block] as usize;
        let words = self.bits.words();
        let mut w = block * WORDS_PER_BLOCK;
        loop {
            let c = words[w].count_ones() as usize;
            if c >= remaining {
                return w * 64 + select_in_word(words[w], (remaining - 1) as u32) as usize + 1;
            }
            remaining -= c;
            w += 1;
        }
    }

    /// Position of the k-th zero, `1 <= k <= count_zeros()`.
    pub fn select0(&self, k: usize) -> usize {
        debug_assert!(k >= 1 && k <= self.count_zeros());
        let zeros_before = |b: usize| b * BLOCK_BITS - self.blocks[b] as usize;
        let nblocks = self.blocks.len() - 1;
        let (mut lo, mut hi) = (0usize, nblocks);
        // last block with zeros_before < k
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if zeros_before(mid) < k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut remaining = k - zeros_before(lo);
        let words = self.bits.words();
        let mut w = lo * WORDS_PER_BLOCK;
        loop {
            let inv = !words[w];
            let c = inv.count_ones() as usize;
            if c >= remaining {
                return w * 64 + select_in_word(inv, (remaining - 1) as u32) as usize + 1;
            }
            remaining -= c;
            w += 1;
        }
    }

    #[inline]
    pub fn select(&self, bit: bool, k: usize) -> usize {
        if bit {
            self.select1(k)
        } else {
            self.select0(k)
        }
    }
}

impl Encode for PlainBitmap {
    fn encode(&self, out: &mut Vec<u8>) {
        self.bits.encode(out);
        serial::put_len(out, self.blocks.len());
        for &b in &self.blocks {
            serial::put_u32(out, b);
        }
    }
}

impl Decode for PlainBitmap {
    fn decode(r: &mut Reader<'_>) -> Result<Self, LoadError> {
        let bits = BitBuf::decode(r)?;
        let n = r.len("rank directory")?;
        let mut blocks = Vec::with_capacity(n.min(1 << 20));
        for _ in 0..n {
            blocks.push(r.u32("rank directory")?);
        }
        let rebuilt = PlainBitmap::new(bits);
        if rebuilt.blocks != blocks {
            return Err(serial::malformed("rank directory does not match bits"));
        }
        Ok(rebuilt)
    }
}
