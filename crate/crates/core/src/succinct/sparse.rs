//! Sparse bitmap stored as Elias-δ coded gaps between consecutive ones,
//! with the absolute position and stream offset of every s-th one sampled.
//!
//! `select1` jumps to the previous sample and decodes at most `s - 1`
//! gaps; `rank` and `select0` first binary-search the samples. Runs of
//! short codes are skipped a 16-bit window at a time through a table.

use std::sync::OnceLock;

use crate::error::{Error, LoadError, Result};
use crate::serial::{self, Decode, Encode, Reader};

use super::bits::{bit_len, BitBuf};

pub const DEFAULT_SAMPLE_RATE: usize = 32;

fn write_gamma(buf: &mut BitBuf, v: u64) {
    debug_assert!(v >= 1);
    let len = bit_len(v);
    buf.push_bits(0, len - 1);
    buf.push(true);
    buf.push_bits(v, len - 1);
}

#[inline]
fn read_gamma(buf: &BitBuf, pos: &mut usize) -> u64 {
    let zeros = buf.zeros_before_one(*pos);
    *pos += zeros as usize + 1;
    let low = buf.read_bits(*pos, zeros);
    *pos += zeros as usize;
    (1u64 << zeros) | low
}

/// Appends the Elias-δ code of `v >= 1`.
pub fn write_delta(buf: &mut BitBuf, v: u64) {
    debug_assert!(v >= 1);
    let len = bit_len(v);
    write_gamma(buf, len as u64);
    buf.push_bits(v, len - 1);
}

/// Decodes an Elias-δ code starting at `*pos`, advancing `pos`.
#[inline]
pub fn read_delta(buf: &BitBuf, pos: &mut usize) -> u64 {
    let len = read_gamma(buf, pos) as u32;
    let low = buf.read_bits(*pos, len - 1);
    *pos += len as usize - 1;
    (1u64 << (len - 1)) | low
}

const WINDOW: u32 = 16;

/// The complete codes at the start of a window.
#[derive(Debug, Clone, Copy, Default)]
struct Batch {
    count: u8,
    bits: u8,
    sum: u16,
}

fn decode_window(w: u32) -> Batch {
    let mut b = Batch::default();
    let mut used = 0u32;
    while used < WINDOW {
        let rest = w >> used;
        let avail = WINDOW - used;
        if rest == 0 {
            break;
        }
        let z = rest.trailing_zeros();
        if 2 * z + 1 > avail {
            break;
        }
        let len = (1u32 << z) | ((rest >> (z + 1)) & ((1u32 << z) - 1));
        let total = 2 * z + len;
        if total > avail {
            break;
        }
        let v = (1u32 << (len - 1)) | ((rest >> (2 * z + 1)) & ((1u32 << (len - 1)) - 1));
        used += total;
        b.count += 1;
        b.bits = used as u8;
        b.sum += v as u16;
    }
    b
}

fn batch_table() -> &'static [Batch] {
    static TABLE: OnceLock<Vec<Batch>> = OnceLock::new();
    TABLE.get_or_init(|| (0..1u32 << WINDOW).map(decode_window).collect())
}

/// Decodes `ones` gaps with bounds checks, for untrusted input.
fn checked_positions(buf: &BitBuf, ones: usize, universe: usize) -> Option<Vec<usize>> {
    let mut pos = 0usize;
    let bits = |width: usize, pos: &mut usize| -> Option<u64> {
        if width > 64 || *pos + width > buf.len() {
            return None;
        }
        let v = buf.read_bits(*pos, width as u32);
        *pos += width;
        Some(v)
    };
    let mut out = Vec::with_capacity(ones);
    let mut at = 0usize;
    for _ in 0..ones {
        let mut zeros = 0;
        while bits(1, &mut pos)? == 0 {
            zeros += 1;
            if zeros > 6 {
                return None;
            }
        }
        let len = ((1u64 << zeros) | bits(zeros, &mut pos)?) as usize;
        if len == 0 || len > 64 {
            return None;
        }
        let gap = (1u64 << (len - 1)) | bits(len - 1, &mut pos)?;
        at = at.checked_add(usize::try_from(gap).ok()?)?;
        if at > universe {
            return None;
        }
        out.push(at);
    }
    (pos == buf.len()).then_some(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseBitmap {
    universe: usize,
    ones: usize,
    gaps: BitBuf,
    sample_rate: usize,
    /// Position of one number `k * sample_rate + 1`.
    sample_pos: Vec<u64>,
    /// Stream offset of the gap code following that sampled one.
    sample_off: Vec<u64>,
}

impl SparseBitmap {
    /// Builds from strictly increasing 1-based positions in `[1, universe]`.
    pub fn new(positions: &[usize], universe: usize, sample_rate: usize) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::invalid("sample rate must be at least 1"));
        }
        let mut gaps = BitBuf::new();
        let mut sample_pos = Vec::with_capacity(positions.len() / sample_rate + 1);
        let mut sample_off = Vec::with_capacity(positions.len() / sample_rate + 1);
        let mut prev = 0usize;
        for (j, &p) in positions.iter().enumerate() {
            if p <= prev {
                return Err(Error::invalid(format!(
                    "positions must be strictly increasing and >= 1 (got {p} after {prev})"
                )));
            }
            if p > universe {
                return Err(Error::invalid(format!("position {p} exceeds universe {universe}")));
            }
            write_delta(&mut gaps, (p - prev) as u64);
            if j % sample_rate == 0 {
                sample_pos.push(p as u64);
                sample_off.push(gaps.len() as u64);
            }
            prev = p;
        }
        Ok(SparseBitmap {
            universe,
            ones: positions.len(),
            gaps,
            sample_rate,
            sample_pos,
            sample_off,
        })
    }

    pub fn len(&self) -> usize {
        self.universe
    }

    pub fn is_empty(&self) -> bool {
        self.universe == 0
    }

    pub fn count_ones(&self) -> usize {
        self.ones
    }

    pub fn count_zeros(&self) -> usize {
        self.universe - self.ones
    }

    pub fn sample_rate(&self) -> usize {
        self.sample_rate
    }

    /// Bit at 1-based position `pos`.
    pub fn get(&self, pos: usize) -> Result<bool> {
        if pos == 0 || pos > self.universe {
            return Err(Error::range("bitmap position", pos, 1, self.universe));
        }
        let r = self.rank1(pos)?;
        Ok(r > 0 && self.select1(r)? == pos)
    }

    /// Number of ones in `[1, i]`.
    pub fn rank1(&self, i: usize) -> Result<usize> {
        Ok(self.rank1_last(i)?.0)
    }

    /// Number `r` of ones in `[1, i]` and the position of the `r`-th one,
    /// 0 when `r = 0`.
    pub fn rank1_last(&self, i: usize) -> Result<(usize, usize)> {
        if i > self.universe {
            return Err(Error::range("rank position", i, 0, self.universe));
        }
        if self.ones == 0 || (self.sample_pos[0] as usize) > i {
            return Ok((0, 0));
        }
        let k = self.sample_pos.partition_point(|&p| p as usize <= i) - 1;
        let mut count = k * self.sample_rate + 1;
        let mut pos = self.sample_pos[k] as usize;
        let mut off = self.sample_off[k] as usize;
        let block_end = ((k + 1) * self.sample_rate).min(self.ones);
        let table = batch_table();
        while count < block_end {
            let b = table[self.gaps.read_bits(off, WINDOW) as usize];
            let c = b.count as usize;
            if c > 0 && c <= block_end - count && pos + b.sum as usize <= i {
                off += b.bits as usize;
                pos += b.sum as usize;
                count += c;
                continue;
            }
            let next = pos + read_delta(&self.gaps, &mut off) as usize;
            if next > i {
                break;
            }
            pos = next;
            count += 1;
        }
        Ok((count, pos))
    }

    pub fn rank0(&self, i: usize) -> Result<usize> {
        Ok(i - self.rank1(i)?)
    }

    pub fn rank(&self, bit: bool, i: usize) -> Result<usize> {
        if bit {
            self.rank1(i)
        } else {
            self.rank0(i)
        }
    }

    /// Position of the k-th one.
    pub fn select1(&self, k: usize) -> Result<usize> {
        if k == 0 || k > self.ones {
            return Err(Error::range("select1 rank", k, 1, self.ones));
        }
        let s = (k - 1) / self.sample_rate;
        let mut off = self.sample_off[s] as usize;
        Ok(self.sample_pos[s] as usize + self.skip(&mut off, (k - 1) % self.sample_rate))
    }

    /// Positions of the `(k-1)`-th and `k`-th ones, the first being 0 for
    /// `k = 1`.
    pub fn select1_pair(&self, k: usize) -> Result<(usize, usize)> {
        if k == 0 || k > self.ones {
            return Err(Error::range("select1 rank", k, 1, self.ones));
        }
        if (k - 1).is_multiple_of(self.sample_rate) {
            let prev = if k == 1 { 0 } else { self.select1(k - 1)? };
            return Ok((prev, self.sample_pos[(k - 1) / self.sample_rate] as usize));
        }
        let s = (k - 1) / self.sample_rate;
        let mut off = self.sample_off[s] as usize;
        let prev = self.sample_pos[s] as usize + self.skip(&mut off, (k - 2) % self.sample_rate);
        Ok((prev, prev + read_delta(&self.gaps, &mut off) as usize))
    }

    /// Sum of the next `r` gaps from stream offset `off`, advancing it.
    #[inline]
    fn skip(&self, off: &mut usize, mut r: usize) -> usize {
        let table = batch_table();
        let mut sum = 0;
        while r > 0 {
            let b = table[self.gaps.read_bits(*off, WINDOW) as usize];
            let c = b.count as usize;
            if c > 0 && c <= r {
                *off += b.bits as usize;
                sum += b.sum as usize;
                r -= c;
            } else {
                sum += read_delta(&self.gaps, off) as usize;
                r -= 1;
            }
        }
        sum
    }

    /// Position of the k-th zero.
    pub fn select0(&self, k: usize) -> Result<usize> {
        let zeros = self.count_zeros();
        if k == 0 || k > zeros {
            return Err(Error::range("select0 rank", k, 1, zeros));
        }
        // The answer is k + r, where r is the number of ones preceding the
        // k-th zero: the largest r with pos_r - r < k.
        let zeros_before = |s: usize| self.sample_pos[s] as usize - (s * self.sample_rate + 1);
        let (mut lo, mut hi) = (0usize, self.sample_pos.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if zeros_before(mid) < k {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let cut = lo;
        if cut == 0 {
            return Ok(k);
        }
        let s = cut - 1;
        let mut r = s * self.sample_rate + 1;
        let mut pos = self.sample_pos[s] as usize;
        let mut off = self.sample_off[s] as usize;
        let block_end = ((s + 1) * self.sample_rate).min(self.ones);
        let table = batch_table();
        while r < block_end {
            let b = table[self.gaps.read_bits(off, WINDOW) as usize];
            let c = b.count as usize;
            if c > 0 && c <= block_end - r && pos + b.sum as usize - (r + c) < k {
                off += b.bits as usize;
                pos += b.sum as usize;
                r += c;
                continue;
            }
            let next = pos + read_delta(&self.gaps, &mut off) as usize;
            if next - (r + 1) >= k {
                break;
            }
            pos = next;
            r += 1;
        }
        Ok(k + r)
    }

    pub fn select(&self, bit: bool, k: usize) -> Result<usize> {
        if bit {
            self.select1(k)
        } else {
            self.select0(k)
        }
    }

    /// Decodes every set position in order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        let mut off = 0usize;
        let mut pos = 0usize;
        (0..self.ones).map(move |_| {
            pos += read_delta(&self.gaps, &mut off) as usize;
            pos
        })
    }

    /// Positions of the k-th one and every later one, decoded sequentially.
    pub fn ones_from(&self, k: usize) -> Result<impl Iterator<Item = usize> + '_> {
        if k == 0 || k > self.ones + 1 {
            return Err(Error::range("ones_from rank", k, 1, self.ones + 1));
        }
        let (mut pos, mut off) = (0usize, 0usize);
        if k <= self.ones {
            let s = (k - 1) / self.sample_rate;
            off = self.sample_off[s] as usize;
            pos = self.sample_pos[s] as usize + self.skip(&mut off, (k - 1) % self.sample_rate);
        }
        let mut first = true;
        Ok((k..=self.ones).map(move |_| {
            if !first {
                pos += read_delta(&self.gaps, &mut off) as usize;
            }
            first = false;
            pos
        }))
    }
}

impl Encode for SparseBitmap {
    fn encode(&self, out: &mut Vec<u8>) {
        serial::put_len(out, self.universe);
        serial::put_len(out, self.ones);
        serial::put_len(out, self.sample_rate);
        self.gaps.encode(out);
        serial::put_words(out, &self.sample_pos);
        serial::put_words(out, &self.sample_off);
    }
}

impl Decode for SparseBitmap {
    fn decode(r: &mut Reader<'_>) -> Result<Self, LoadError> {
        let universe = r.len("sparse bitmap universe")?;
        let ones = r.len("sparse bitmap ones")?;
        let sample_rate = r.len("sparse bitmap sample rate")?;
        let gaps = BitBuf::decode(r)?;
        let sample_pos = r.words("sparse bitmap samples")?;
        let sample_off = r.words("sparse bitmap samples")?;
        if sample_rate == 0
            || ones > universe
            || sample_pos.len() != ones.div_ceil(sample_rate)
            || sample_off.len() != sample_pos.len()
            || sample_off.iter().any(|&o| o as usize > gaps.len())
            || sample_pos.iter().any(|&p| p == 0 || p as usize > universe)
        {
            return Err(serial::malformed("sparse bitmap header"));
        }
        let positions =
            checked_positions(&gaps, ones, universe).ok_or_else(|| serial::malformed("sparse bitmap gaps"))?;
        let rebuilt = SparseBitmap::new(&positions, universe, sample_rate)
            .map_err(|e| serial::malformed(e.to_string()))?;
        if rebuilt.gaps != gaps || rebuilt.sample_pos != sample_pos || rebuilt.sample_off != sample_off {
            return Err(serial::malformed("sparse bitmap samples"));
        }
        Ok(rebuilt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const E_PHRASE_ENDS: [usize; 9] = [1, 2, 4, 6, 7, 9, 12, 19, 21];

    fn s_of_e() -> SparseBitmap {
        // 111 0 11111 0 1 0 followed by 19 zeros
        SparseBitmap::new(&[1, 2, 3, 5, 6, 7, 8, 9, 11], 31, 2).unwrap()
    }

    #[test]
    fn delta_codes_round_trip() {
        let vals = [1u64, 2, 3, 4, 5, 15, 16, 17, 1000, 1 << 40, u64::MAX];
        let mut b = BitBuf::new();
        vals.iter().for_each(|&v| write_delta(&mut b, v));
        let mut pos = 0;
        for &v in &vals {
            assert_eq!(read_delta(&b, &mut pos), v);
        }
        assert_eq!(pos, b.len());
        // δ(1) is a single bit
        let mut one = BitBuf::new();
        write_delta(&mut one, 1);
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn phrase_end_bitmap_of_example() {
        let b = SparseBitmap::new(&E_PHRASE_ENDS, 21, 4).unwrap();
        assert_eq!(b.rank1(6).unwrap(), 4);
        assert_eq!(b.rank1(0).unwrap(), 0);
        assert_eq!(b.select1(3).unwrap(), 4);
        assert_eq!(b.select1(9).unwrap(), 21);
        assert!(b.get(21).unwrap());
        assert!(!b.get(20).unwrap());
    }

    #[test]
    fn source_bitmap_of_example() {
        let s = s_of_e();
        assert_eq!(s.rank0(11).unwrap(), 2);
        assert_eq!(s.select0(3).unwrap(), 12);
        assert_eq!(s.select0(1).unwrap(), 4);
        assert_eq!(s.select0(22).unwrap(), 31);
        assert!(s.select0(23).is_err());
    }

    #[test]
    fn empty_and_full() {
        let e = SparseBitmap::new(&[], 10, 32).unwrap();
        assert_eq!(e.rank1(10).unwrap(), 0);
        assert_eq!(e.select0(10).unwrap(), 10);
        assert!(e.select1(1).is_err());

        let all: Vec<usize> = (1..=100).collect();
        let f = SparseBitmap::new(&all, 100, 7).unwrap();
        for i in 0..=100 {
            assert_eq!(f.rank1(i).unwrap(), i);
        }
        assert!(f.select0(1).is_err());
    }

    #[test]
    fn window_table_matches_decoder() {
        let mut b = BitBuf::new();
        for v in [1u64, 1, 2, 1, 3, 1, 1, 7] {
            write_delta(&mut b, v);
        }
        let w = b.read_bits(0, WINDOW) as u32;
        let batch = decode_window(w);
        let mut pos = 0;
        let mut sum = 0;
        for _ in 0..batch.count {
            sum += read_delta(&b, &mut pos);
        }
        assert!(batch.count >= 4);
        assert_eq!((batch.bits as usize, batch.sum as u64), (pos, sum));
        assert_eq!(decode_window(0).count, 0);
    }

    #[test]
    fn pairs_and_last_ones() {
        let s = s_of_e();
        let ones = [1, 2, 3, 5, 6, 7, 8, 9, 11];
        for k in 1..=9 {
            let prev = if k == 1 { 0 } else { ones[k - 2] };
            assert_eq!(s.select1_pair(k).unwrap(), (prev, ones[k - 1]));
        }
        assert_eq!(s.rank1_last(10).unwrap(), (8, 9));
        assert_eq!(s.rank1_last(0).unwrap(), (0, 0));
        assert!(s.select1_pair(10).is_err());
    }

    #[test]
    fn validation_errors() {
        assert!(SparseBitmap::new(&[2, 2], 5, 1).is_err());
        assert!(SparseBitmap::new(&[3, 1], 5, 1).is_err());
        assert!(SparseBitmap::new(&[0], 5, 1).is_err());
        assert!(SparseBitmap::new(&[6], 5, 1).is_err());
        assert!(SparseBitmap::new(&[1], 5, 0).is_err());
        let b = SparseBitmap::new(&[1], 5, 1).unwrap();
        assert!(matches!(b.rank1(6), Err(Error::OutOfRange { .. })));
    }
}
