use std::collections::BTreeSet;

use crate::suffix::SuffixIndex;

use super::lz77::PrefixMatcher;
use super::{Flavor, Parsing, Phrase};

/// Answers "does `text[i..i+len]` end at one of the registered phrase
/// ends?" using the suffix array of the reversed text. The reversal of a
/// string ending at text position `e` is a prefix of the reversed suffix
/// starting at `n - 1 - e`, so matches are suffix-array neighbours with a
/// long enough common prefix.
pub(crate) struct EndMatcher<'a> {
    rev: SuffixIndex<'a>,
    marked: BTreeSet<u32>,
}

impl<'a> EndMatcher<'a> {
    pub(crate) fn new(reversed: &'a [u8]) -> Self {
        EndMatcher {
            rev: SuffixIndex::new(reversed),
            marked: BTreeSet::new(),
        }
    }

    fn n(&self) -> usize {
        self.rev.text().len()
    }

    /// Registers a phrase ending at 0-based text position `e`.
    pub(crate) fn mark_end(&mut self, e: usize) {
        let r = self.rev.rank[self.n() - 1 - e];
        self.marked.insert(r);
    }

    /// Smallest registered end `e` with `text[e+1-len..=e] == text[i..i+len]`.
    pub(crate) fn leftmost_end(&self, i: usize, len: usize) -> Option<usize> {
        let n = self.n();
        let a = n - i - len;
        let ra = self.rev.rank[a] as usize;
        let mut best: Option<usize> = None;
        let mut consider = |r: u32| {
            let e = n - 1 - self.rev.sa[r as usize] as usize;
            best = Some(best.map_or(e, |b: usize| b.min(e)));
        };
        for &r in self.marked.range(..ra as u32).rev() {
            if self.rev.lcp_ranks(r as usize, ra) < len {
                break;
            }
            consider(r);
        }
        for &r in self.marked.range(ra as u32 + 1..) {
            if self.rev.lcp_ranks(ra, r as usize) < len {
                break;
            }
            consider(r);
        }
        best
    }

    pub(crate) fn has_end(&self, i: usize, len: usize) -> bool {
        let n = self.n();
        let ra = self.rev.rank[n - i - len] as usize;
        let before = self.marked.range(..ra as u32).next_back();
        let after = self.marked.range(ra as u32 + 1..).next();
        before.is_some_and(|&r| self.rev.lcp_ranks(r as usize, ra) >= len)
            || after.is_some_and(|&r| self.rev.lcp_ranks(ra, r as usize) >= len)
    }
}

/// Greedy LZ-End parsing: each copied part is the longest prefix of the
/// remaining text that ends exactly at an earlier phrase boundary. Among
/// equally long candidates the leftmost source is kept.
pub fn parse_lzend(text: &[u8]) -> Parsing {
    let n = text.len();
    let mut phrases = Vec::new();
    if n > 0 {
        let forward = PrefixMatcher::new(text);
        let reversed: Vec<u8> = text.iter().rev().copied().collect();
        let mut ends = EndMatcher::new(&reversed);
        let mut i = 0;
        while i < n {
            // an LZ-End source is in particular an earlier occurrence
            let (bound, _) = forward.longest_previous(i, n - i - 1);
            let mut chosen = (0, 0);
            for len in (1..=bound).rev() {
                if let Some(e) = ends.leftmost_end(i, len) {
                    chosen = (len, e + 2 - len);
                    break;
                }
            }
            let (len, start) = chosen;
            phrases.push(Phrase {
                copy_start: start,
                copy_len: len,
                explicit_char: text[i + len],
            });
            i += len + 1;
            ends.mark_end(i - 1);
        }
    }
    Parsing {
        flavor: Flavor::LzEnd,
        text_len: n,
        phrases,
    }
}
