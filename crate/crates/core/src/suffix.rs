//! Build-time suffix machinery: suffix array, inverse, LCP array and
//! range-minimum queries. Only used while constructing parsings and tries.

use suffix_array::SuffixArray;

const BLOCK: usize = 32;

/// Range minimum over a fixed array: a sparse table over block minima plus
/// linear scans inside the partial end blocks.
#[derive(Debug, Clone)]
pub(crate) struct RangeMin {
    values: Vec<u32>,
    table: Vec<Vec<u32>>,
}

impl RangeMin {
    pub(crate) fn new(values: Vec<u32>) -> Self {
        let blocks: Vec<u32> = values
            .chunks(BLOCK)
            .map(|c| c.iter().copied().min().unwrap())
            .collect();
        let mut table = vec![blocks];
        let mut span = 1;
        while span * 2 <= table[0].len() {
            let prev = table.last().unwrap();
            let next: Vec<u32> = (0..prev.len() - span)
                .map(|i| prev[i].min(prev[i + span]))
                .collect();
            table.push(next);
            span *= 2;
        }
        RangeMin { values, table }
    }

    /// Minimum of `values[lo..hi]`, `lo < hi`.
    pub(crate) fn min(&self, lo: usize, hi: usize) -> u32 {
        debug_assert!(lo < hi && hi <= self.values.len());
        let (bl, bh) = (lo / BLOCK, (hi - 1) / BLOCK);
        if bh <= bl + 1 {
            return self.values[lo..hi].iter().copied().min().unwrap();
        }
        let head = self.values[lo..(bl + 1) * BLOCK].iter().copied().min().unwrap();
        let tail = self.values[bh * BLOCK..hi].iter().copied().min().unwrap();
        let (a, b) = (bl + 1, bh); // full blocks [a, b)
        let k = (usize::BITS - 1 - (b - a).leading_zeros()) as usize;
        let mid = self.table[k][a].min(self.table[k][b - (1 << k)]);
        head.min(tail).min(mid)
    }
}

pub(crate) struct SuffixIndex<'a> {
    text: &'a [u8],
    /// Suffix start positions (0-based) in lexicographic order.
    pub(crate) sa: Vec<u32>,
    /// Inverse of `sa`.
    pub(crate) rank: Vec<u32>,
    lcp: RangeMin,
}

impl<'a> SuffixIndex<'a> {
    pub(crate) fn new(text: &'a [u8]) -> Self {
        assert!(text.len() < u32::MAX as usize, "text too long");
        let n = text.len();
        let (_, full) = SuffixArray::new(text).into_parts();
        // drop the empty suffix, which always sorts first
        let sa: Vec<u32> = full.into_iter().filter(|&p| (p as usize) < n).collect();
        let mut rank = vec![0u32; n];
        for (r, &p) in sa.iter().enumerate() {
            rank[p as usize] = r as u32;
        }
        // Kasai
        let mut lcp = vec![0u32; n];
        let mut h = 0usize;
        for p in 0..n {
            let r = rank[p] as usize;
            if r == 0 {
                h = 0;
                continue;
            }
            let q = sa[r - 1] as usize;
            while p + h < n && q + h < n && text[p + h] == text[q + h] {
                h += 1;
            }
            lcp[r] = h as u32;
            h = h.saturating_sub(1);
        }
        SuffixIndex {
            text,
            sa,
            rank,
            lcp: RangeMin::new(lcp),
        }
    }

    pub(crate) fn text(&self) -> &'a [u8] {
        self.text
    }

    /// Longest common prefix of the suffixes at ranks `r1 != r2`.
    pub(crate) fn lcp_ranks(&self, r1: usize, r2: usize) -> usize {
        let (a, b) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
        self.lcp.min(a + 1, b + 1) as usize
    }

    /// Longest common prefix of the suffixes starting at `p` and `q`.
    pub(crate) fn lcp_positions(&self, p: usize, q: usize) -> usize {
        if p == q {
            return self.text.len() - p;
        }
        self.lcp_ranks(self.rank[p] as usize, self.rank[q] as usize)
    }

    /// Narrows the rank interval `[lo, hi)`, whose suffixes all share a
    /// prefix of length `depth`, to those whose next character is `c`.
    pub(crate) fn narrow(&self, lo: usize, hi: usize, depth: usize, c: u8) -> (usize, usize) {
        let n = self.text.len();
        let key = |p: u32| -> i32 {
            let at = p as usize + depth;
            if at < n {
                self.text[at] as i32
            } else {
                -1
            }
        };
        let slice = &self.sa[lo..hi];
        let a = slice.partition_point(|&p| key(p) < c as i32);
        let b = slice.partition_point(|&p| key(p) <= c as i32);
        (lo + a, lo + b)
    }

    /// Rank interval of suffixes having `pattern` as a prefix.
    pub(crate) fn interval(&self, pattern: &[u8]) -> (usize, usize) {
        let mut lo = 0;
        let mut hi = self.sa.len();
        for (d, &c) in pattern.iter().enumerate() {
            let (a, b) = self.narrow(lo, hi, d, c);
            lo = a;
            hi = b;
            if lo >= hi {
                break;
            }
        }
        (lo, hi)
    }
}
