use crate::error::{Error, Result};
use crate::patricia::{binsearch_range, KeyAccess, SearchRange};

use super::{IndexCore, OccurrenceSet, ReverseSide, SuffixSide};

/// A primary occurrence: the pattern's first `split` bytes end phrase
/// `phrase`, and the occurrence starts at `position`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimaryHit {
    pub position: usize,
    pub phrase: usize,
    pub split: usize,
}

/// Text suffixes starting at phrase starts, read through extraction.
struct SuffixKeys<'a>(&'a IndexCore);

impl KeyAccess for SuffixKeys<'_> {
    fn count(&self) -> usize {
        self.0.n_prime
    }

    fn key_len(&self, rank: usize) -> Result<usize> {
        let (start, _) = self.0.phrase_bounds(self.0.id(rank)?)?;
        Ok(self.0.n + 1 - start)
    }

    fn key_prefix(&self, rank: usize, len: usize) -> Result<Vec<u8>> {
        self.key_head(rank, len)
    }

    fn key_head(&self, rank: usize, max_len: usize) -> Result<Vec<u8>> {
        let (start, _) = self.0.phrase_bounds(self.0.id(rank)?)?;
        let take = (self.0.n + 1 - start).min(max_len);
        if take == 0 {
            return Ok(Vec::new());
        }
        self.0.extract(start, start + take - 1)
    }
}

/// Phrases read backwards, through extraction.
struct ReverseKeys<'a>(&'a IndexCore);

impl KeyAccess for ReverseKeys<'_> {
    fn count(&self) -> usize {
        self.0.n_prime
    }

    fn key_len(&self, rank: usize) -> Result<usize> {
        let (start, end) = self.0.phrase_bounds(self.0.rev_id(rank)?)?;
        Ok(end + 1 - start)
    }

    fn key_prefix(&self, rank: usize, len: usize) -> Result<Vec<u8>> {
        self.key_head(rank, len)
    }

    fn key_head(&self, rank: usize, max_len: usize) -> Result<Vec<u8>> {
        let (start, end) = self.0.phrase_bounds(self.0.rev_id(rank)?)?;
        let take = (end + 1 - start).min(max_len);
        if take == 0 {
            return Ok(Vec::new());
        }
        let mut v = self.0.extract(end + 1 - take, end)?;
        v.reverse();
        Ok(v)
    }
}

fn check_pattern(p: &[u8]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::invalid("empty pattern"));
    }
    Ok(())
}

impl IndexCore {
    /// Ranks of the phrase-start suffixes prefixed by `key`.
    pub fn suffix_range(&self, key: &[u8]) -> Result<SearchRange> {
        match &self.suffix_side {
            SuffixSide::Trie(t) => Ok(t.search(key)),
            SuffixSide::Ids(_) | SuffixSide::Implicit => binsearch_range(&SuffixKeys(self), key),
        }
    }

    /// Ranks of the reversed phrases prefixed by `key`.
    pub fn reverse_range(&self, key: &[u8]) -> Result<SearchRange> {
        match &self.reverse_side {
            ReverseSide::Trie(t) => Ok(t.search(key)),
            ReverseSide::Ids(_) => binsearch_range(&ReverseKeys(self), key),
        }
    }

    /// Whether `p` occurs starting `split` bytes before the end of phrase
    /// `k`.
    fn occurs_at_phrase(&self, k: usize, split: usize, p: &[u8]) -> Result<bool> {
        let (start, end) = self.phrase_bounds(k)?;
        if end + 1 - start < split || end - split + p.len() > self.n {
            return Ok(false);
        }
        let pos = end + 1 - split;
        Ok(self.extract(pos, pos + p.len() - 1)? == p)
    }

    fn primary_hits(&self, p: &[u8], first_only: bool) -> Result<Vec<PrimaryHit>> {
        check_pattern(p)?;
        let mut hits = Vec::new();
        for split in 1..=p.len() {
            let left: Vec<u8> = p[..split].iter().rev().copied().collect();
            let rr = self.reverse_range(&left)?;
            if rr.is_empty() {
                continue;
            }
            let right = &p[split..];
            let sr = if right.is_empty() {
                SearchRange::new(1, self.n_prime, true)
            } else {
                self.suffix_range(right)?
            };
            if sr.is_empty() {
                continue;
            }
            let mut phrases = Vec::new();
            for (_, j) in self.rwt.range_report(sr.lo, sr.hi, rr.lo as u64, rr.hi as u64) {
                phrases.push(self.rev_id(j as usize)?);
            }
            // the last phrase precedes no suffix, so only an empty right
            // part can follow it
            if right.is_empty() && rr.contains(self.last_rev_rank) {
                phrases.push(self.n_prime);
            }
            let Some(&probe) = phrases.first() else {
                continue;
            };
            if !(rr.verified && sr.verified) && !self.occurs_at_phrase(probe, split, p)? {
                continue;
            }
            for k in phrases {
                let end = self.b.select1(k)?;
                hits.push(PrimaryHit {
                    position: end + 1 - split,
                    phrase: k,
                    split,
                });
                if first_only {
                    return Ok(hits);
                }
            }
        }
        Ok(hits)
    }

    /// Occurrences of `p` that contain a phrase end.
    pub fn find_primary(&self, p: &[u8]) -> Result<Vec<PrimaryHit>> {
        self.primary_hits(p, false)
    }

    /// Every occurrence has a primary one, so a single primary hit
    /// settles existence.
    pub fn exists(&self, p: &[u8]) -> Result<bool> {
        Ok(!self.primary_hits(p, true)?.is_empty())
    }

    /// Reports every occurrence copied, directly or transitively, from the
    /// occurrence of length `m` at `pos`.
    ///
    /// For an occurrence at `i`, the sources starting at or before `i` are
    /// scanned from the rightmost one leftwards. A source that does not
    /// cover the occurrence lowers the depth bound to its own depth, since
    /// only shallower sources to its left can still reach far enough right.
    pub fn chase_sources(&self, pos: usize, m: usize, sink: &mut impl FnMut(usize)) -> Result<()> {
        let mut work = vec![pos];
        while let Some(i) = work.pop() {
            // sources starting at or before i are the ones preceding the
            // (i+1)-th zero
            let mut s = self.s.select0(i + 1)? - (i + 1);
            let mut d = self.delta as u64 + 1;
            while s > 0 {
                let t = self.s.select1(s)? - s;
                let f = self.p.inverse(s)?;
                let (c, end) = self.phrase_bounds(f)?;
                let copy_len = end - c;
                if copy_len > 0 && t + copy_len >= i + m {
                    let y = c + i - t;
                    sink(y);
                    work.push(y);
                } else {
                    d = self.dwt.access(s)?;
                }
                match self.dwt.prev_less(s, d) {
                    Some(prev) => s = prev,
                    None => break,
                }
            }
        }
        Ok(())
    }

    /// Occurrence positions in discovery order and the number of primary
    /// ones, which come first.
    pub fn locate_raw(&self, p: &[u8]) -> Result<(Vec<usize>, usize)> {
        let mut out: Vec<usize> = self.find_primary(p)?.iter().map(|h| h.position).collect();
        let primary = out.len();
        for i in 0..primary {
            let pos = out[i];
            self.chase_sources(pos, p.len(), &mut |y| out.push(y))?;
        }
        Ok((out, primary))
    }

    pub fn locate(&self, p: &[u8]) -> Result<OccurrenceSet> {
        let (mut positions, primary) = self.locate_raw(p)?;
        positions.sort_unstable();
        let total = positions.len();
        positions.dedup();
        debug_assert_eq!(positions.len(), total, "occurrence reported twice");
        Ok(OccurrenceSet {
            secondary_count: positions.len() - primary,
            primary_count: primary,
            positions,
        })
    }

    /// Number of occurrences, found by locating them all.
    pub fn count(&self, p: &[u8]) -> Result<usize> {
        Ok(self.locate_raw(p)?.0.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::tests::e_index;
    use crate::index::Variant;
    use crate::parsing::tests::E;

    #[test]
    fn primary_hits_of_example() {
        for v in Variant::ALL {
            let idx = e_index(v);
            let hits = idx.find_primary(b"ala").unwrap();
            assert_eq!(hits, vec![PrimaryHit { position: 1, phrase: 1, split: 1 }], "variant {v}");
            let la: Vec<usize> = idx.find_primary(b"la").unwrap().iter().map(|h| h.position).collect();
            assert_eq!(la, vec![2]);
            let dollar = idx.find_primary(b"$").unwrap();
            assert_eq!(dollar, vec![PrimaryHit { position: 21, phrase: 9, split: 1 }]);
        }
    }

    #[test]
    fn chase_of_example() {
        let idx = e_index(Variant::ImplicitIds);
        let mut got = Vec::new();
        idx.chase_sources(2, 2, &mut |y| got.push(y)).unwrap();
        assert_eq!(got, vec![10, 14]);
        let mut got = Vec::new();
        idx.chase_sources(1, 3, &mut |y| got.push(y)).unwrap();
        assert_eq!(got, vec![13]);
        let mut got = Vec::new();
        idx.chase_sources(14, 2, &mut |y| got.push(y)).unwrap();
        assert!(got.is_empty());
    }

    #[test]
    fn locate_example() {
        for v in Variant::ALL {
            let idx = e_index(v);
            let la = idx.locate(b"la").unwrap();
            assert_eq!(la.positions, vec![2, 10, 14]);
            assert_eq!((la.primary_count, la.secondary_count), (1, 2));
            assert_eq!(idx.locate(b"ala").unwrap().positions, vec![1, 13]);
            assert!(idx.locate(b"zz").unwrap().is_empty());
            assert_eq!(idx.locate(E).unwrap().positions, vec![1]);
            assert!(idx.exists(b"ala").unwrap());
            assert!(!idx.exists(b"bb").unwrap());
            assert!(idx.exists(E).unwrap());
            assert!(idx.locate(b"").is_err());
            assert!(idx.exists(b"").is_err());
            assert_eq!(idx.count(b"a").unwrap(), 9);
        }
    }
}
