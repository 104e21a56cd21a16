//! Pointerless wavelet tree over integer symbols.
//!
//! Level `l` stores one bitmap of the full sequence length: the sequence
//! stably sorted by the top `l` bits of each symbol, marking bit
//! `height - 1 - l`. A node keeps the same block `[b, e)` on every level
//! below it, so its children are `[b, b + zeros)` and `[b + zeros, e)`.

use crate::error::{Error, LoadError, Result};
use crate::serial::{self, Decode, Encode, Reader};

use super::bits::{bit_len, BitBuf};
use super::plain::PlainBitmap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveletTree {
    len: usize,
    max_symbol: u64,
    levels: Vec<PlainBitmap>,
}

/// A node's block on its level.
#[derive(Clone, Copy)]
struct Node {
    level: usize,
    b: usize,
    e: usize,
}

impl WaveletTree {
    pub fn new(seq: &[u64]) -> Self {
        let max_symbol = seq.iter().copied().max().unwrap_or(0);
        let height = bit_len(max_symbol) as usize;
        let mut levels = Vec::with_capacity(height);
        let mut cur = seq.to_vec();
        for l in 0..height {
            let shift = height - 1 - l;
            let mut bits = BitBuf::zeros(cur.len());
            for (i, &x) in cur.iter().enumerate() {
                if (x >> shift) & 1 == 1 {
                    bits.set(i, true);
                }
            }
            levels.push(PlainBitmap::new(bits));
            cur.sort_by_key(|&x| x >> shift);
        }
        WaveletTree {
            len: seq.len(),
            max_symbol,
            levels,
        }
    }

    pub fn from_usizes(seq: &[usize]) -> Self {
        Self::new(&seq.iter().map(|&x| x as u64).collect::<Vec<_>>())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn height(&self) -> usize {
        self.levels.len()
    }

    pub fn max_symbol(&self) -> u64 {
        self.max_symbol
    }

    pub fn level_bitmap(&self, level: usize) -> &PlainBitmap {
        &self.levels[level]
    }

    fn root(&self) -> Node {
        Node {
            level: 0,
            b: 0,
            e: self.len,
        }
    }

    #[inline]
    fn bit_of(&self, level: usize, sym: u64) -> bool {
        (sym >> (self.height() - 1 - level)) & 1 == 1
    }

    /// Zeros in the node's block.
    #[inline]
    fn zeros(&self, n: Node) -> usize {
        let v = &self.levels[n.level];
        v.rank0(n.e) - v.rank0(n.b)
    }

    /// Count of `bit` among the first `k` elements of the node.
    #[inline]
    fn local_rank(&self, n: Node, bit: bool, k: usize) -> usize {
        let v = &self.levels[n.level];
        v.rank(bit, n.b + k) - v.rank(bit, n.b)
    }

    /// Local 1-based position of the k-th `bit` in the node.
    #[inline]
    fn local_select(&self, n: Node, bit: bool, k: usize) -> usize {
        let v = &self.levels[n.level];
        v.select(bit, v.rank(bit, n.b) + k) - n.b
    }

    #[inline]
    fn child(&self, n: Node, bit: bool) -> Node {
        let z = self.zeros(n);
        if bit {
            Node {
                level: n.level + 1,
                b: n.b + z,
                e: n.e,
            }
        } else {
            Node {
                level: n.level + 1,
                b: n.b,
                e: n.b + z,
            }
        }
    }

    /// Child of `n` on the side of `bit`, and the count of `bit` among
    /// the first `k` elements of `n`.
    #[inline]
    fn descend(&self, n: Node, bit: bool, k: usize) -> (Node, usize) {
        let v = &self.levels[n.level];
        let ones_before = v.rank1(n.b);
        let k1 = v.rank1(n.b + k) - ones_before;
        let z = (n.e - n.b) - (v.rank1(n.e) - ones_before);
        let level = n.level + 1;
        if bit {
            (Node { level, b: n.b + z, e: n.e }, k1)
        } else {
            (Node { level, b: n.b, e: n.b + z }, k - k1)
        }
    }

    fn check_pos(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.len {
            return Err(Error::range("sequence position", i, 1, self.len));
        }
        Ok(())
    }

    /// Symbol at 1-based position `i`.
    pub fn access(&self, i: usize) -> Result<u64> {
        self.check_pos(i)?;
        let mut n = self.root();
        let mut k = i; // 1-based local position
        let mut sym = 0u64;
        while n.level < self.height() {
            let bit = self.levels[n.level].get(n.b + k);
            (n, k) = self.descend(n, bit, k);
            sym = (sym << 1) | bit as u64;
        }
        Ok(sym)
    }

    /// Occurrences of `c` in `[1, i]`.
    pub fn rank(&self, c: u64, i: usize) -> Result<usize> {
        if i > self.len {
            return Err(Error::range("rank position", i, 0, self.len));
        }
        if c > self.max_symbol {
            return Ok(0);
        }
        let mut n = self.root();
        let mut k = i;
        while n.level < self.height() && k > 0 {
            (n, k) = self.descend(n, self.bit_of(n.level, c), k);
        }
        Ok(k)
    }

    /// Position of the k-th occurrence of `c`.
    pub fn select(&self, c: u64, k: usize) -> Result<usize> {
        let total = self.rank(c, self.len)?;
        if k == 0 || k > total {
            return Err(Error::range("select rank", k, 1, total));
        }
        let mut path = Vec::with_capacity(self.height());
        let mut n = self.root();
        while n.level < self.height() {
            path.push(n);
            n = self.child(n, self.bit_of(n.level, c));
        }
        let mut pos = k;
        for &p in path.iter().rev() {
            pos = self.local_select(p, self.bit_of(p.level, c), pos);
        }
        Ok(pos)
    }

    /// All `(i, seq[i])` with `i` in `[i_lo, i_hi]` and `seq[i]` in
    /// `[j_lo, j_hi]`, ordered by position. Empty ranges yield nothing.
    pub fn range_report(&self, i_lo: usize, i_hi: usize, j_lo: u64, j_hi: u64) -> Vec<(usize, u64)> {
        let i_lo = i_lo.max(1);
        let i_hi = i_hi.min(self.len);
        let mut out = Vec::new();
        if i_lo > i_hi || j_lo > j_hi || j_lo > self.max_symbol {
            return out;
        }
        let j_hi = j_hi.min(self.max_symbol);
        self.report_rec(self.root(), 0, i_lo - 1, i_hi, j_lo, j_hi, &mut out);
        out.sort_unstable();
        out
    }

    /// Local positions `(lo, hi]` of node `n` whose symbol prefix is `prefix`.
    /// Pushes found points with positions local to `n`, then the caller
    /// lifts them.
    #[allow(clippy::too_many_arguments)]
    fn report_rec(
        &self,
        n: Node,
        prefix: u64,
        lo: usize,
        hi: usize,
        j_lo: u64,
        j_hi: u64,
        out: &mut Vec<(usize, u64)>,
    ) {
        if lo >= hi {
            return;
        }
        let h = self.height();
        let remaining = h - n.level;
        let sym_lo = prefix << remaining;
        let sym_hi = sym_lo | if remaining == 0 { 0 } else { (1u64 << remaining) - 1 };
        if sym_hi < j_lo || sym_lo > j_hi {
            return;
        }
        if n.level == h {
            out.extend((lo + 1..=hi).map(|p| (p, prefix)));
            return;
        }
        for bit in [false, true] {
            let start = out.len();
            let c = self.child(n, bit);
            let clo = self.local_rank(n, bit, lo);
            let chi = self.local_rank(n, bit, hi);
            self.report_rec(c, (prefix << 1) | bit as u64, clo, chi, j_lo, j_hi, out);
            for pt in &mut out[start..] {
                pt.0 = self.local_select(n, bit, pt.0);
            }
        }
    }

    /// Largest `s' < s` with `seq[s'] < d`, or `None`.
    ///
    /// Descends towards the leaf of `d - 1`; whenever the descent goes
    /// right, the last left-child element before the current position is
    /// a candidate, and the best of those and the leaf answer wins.
    pub fn prev_less(&self, s: usize, d: u64) -> Option<usize> {
        if d == 0 || s <= 1 || self.len == 0 {
            return None;
        }
        let k = (s - 1).min(self.len);
        if d > self.max_symbol {
            return Some(k);
        }
        let cap = if self.height() == 0 {
            0
        } else {
            (1u64 << self.height()) - 1
        };
        let target = (d - 1).min(cap);
        self.prev_less_rec(self.root(), k, target)
    }

    fn prev_less_rec(&self, n: Node, k: usize, target: u64) -> Option<usize> {
        if k == 0 {
            return None;
        }
        if n.level == self.height() {
            return Some(k);
        }
        let v = &self.levels[n.level];
        let ones_before = v.rank1(n.b);
        let k1 = v.rank1(n.b + k) - ones_before;
        let k0 = k - k1;
        let zeros_before = n.b - ones_before;
        if !self.bit_of(n.level, target) {
            let z = (n.e - n.b) - (v.rank1(n.e) - ones_before);
            let child = Node {
                level: n.level + 1,
                b: n.b,
                e: n.b + z,
            };
            let r = self.prev_less_rec(child, k0, target)?;
            Some(v.select0(zeros_before + r) - n.b)
        } else {
            let v0 = (k0 > 0).then(|| v.select0(zeros_before + k0) - n.b);
            if k1 == 0 {
                return v0;
            }
            let z = (n.e - n.b) - (v.rank1(n.e) - ones_before);
            let child = Node {
                level: n.level + 1,
                b: n.b + z,
                e: n.e,
            };
            let v1 = self
                .prev_less_rec(child, k1, target)
                .map(|r| v.select1(ones_before + r) - n.b);
            v0.max(v1)
        }
    }
}

impl Encode for WaveletTree {
    fn encode(&self, out: &mut Vec<u8>) {
        serial::put_len(out, self.len);
        serial::put_u64(out, self.max_symbol);
        for l in &self.levels {
            l.encode(out);
        }
    }
}

impl Decode for WaveletTree {
    fn decode(r: &mut Reader<'_>) -> Result<Self, LoadError> {
        let len = r.len("wavelet length")?;
        let max_symbol = r.u64("wavelet alphabet")?;
        let height = bit_len(max_symbol) as usize;
        let mut levels = Vec::with_capacity(height);
        for _ in 0..height {
            let l = PlainBitmap::decode(r)?;
            if l.len() != len {
                return Err(serial::malformed("wavelet level length"));
            }
            levels.push(l);
        }
        Ok(WaveletTree {
            len,
            max_symbol,
            levels,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const D_OF_E: [u64; 9] = [0, 0, 0, 0, 0, 0, 0, 0, 1];
    const R_OF_E: [u64; 9] = [9, 7, 2, 8, 0, 4, 6, 3, 5];

    #[test]
    fn example_sequences() {
        let d = WaveletTree::new(&D_OF_E);
        assert_eq!(d.height(), 1);
        assert_eq!(d.rank(0, 9).unwrap(), 8);
        assert_eq!(d.select(1, 1).unwrap(), 9);
        assert_eq!(d.prev_less(9, 1), Some(8));
        assert_eq!(d.prev_less(1, 5), None);
        assert_eq!(d.prev_less(9, 0), None);

        let r = WaveletTree::new(&R_OF_E);
        assert_eq!(r.height(), 4);
        assert_eq!(r.access(9).unwrap(), 5);
        assert_eq!(r.range_report(8, 9, 5, 5), vec![(9, 5)]);
        let all = r.range_report(1, 9, 1, 9);
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|&(i, _)| i != 5));
        assert!(r.range_report(3, 2, 0, 9).is_empty());
    }

    #[test]
    fn level_lengths_sum_to_sequence_length() {
        let r = WaveletTree::new(&R_OF_E);
        for l in 0..r.height() {
            assert_eq!(r.level_bitmap(l).len(), R_OF_E.len());
        }
    }

    #[test]
    fn empty_tree_queries_are_range_errors() {
        let w = WaveletTree::new(&[]);
        assert!(w.access(1).is_err());
        assert!(w.select(0, 1).is_err());
        assert_eq!(w.rank(0, 0).unwrap(), 0);
        assert!(w.rank(0, 1).is_err());
        assert!(w.range_report(1, 1, 0, 0).is_empty());
        assert_eq!(w.prev_less(1, 1), None);
    }

    #[test]
    fn all_zero_sequence_has_height_zero() {
        let w = WaveletTree::new(&[0, 0, 0]);
        assert_eq!(w.height(), 0);
        assert_eq!(w.access(2).unwrap(), 0);
        assert_eq!(w.rank(0, 2).unwrap(), 2);
        assert_eq!(w.select(0, 3).unwrap(), 3);
        assert_eq!(w.prev_less(3, 1), Some(2));
        assert_eq!(w.prev_less(3, 0), None);
        assert_eq!(w.range_report(1, 3, 0, 0).len(), 3);
    }
}
