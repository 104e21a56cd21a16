use crate::suffix::{RangeMin, SuffixIndex};

use super::{Flavor, Parsing, Phrase};

/// Finds, for phrases starting at a given position, the longest prefix of
/// the remaining text that occurs entirely inside the preceding text, and
/// its leftmost occurrence.
///
/// The search narrows a suffix-array interval one character at a time and
/// asks the minimum starting position in the interval whether an
/// occurrence fits before the phrase.
pub(crate) struct PrefixMatcher<'a> {
    index: SuffixIndex<'a>,
    first: RangeMin,
}

impl<'a> PrefixMatcher<'a> {
    pub(crate) fn new(text: &'a [u8]) -> Self {
        let index = SuffixIndex::new(text);
        let first = RangeMin::new(index.sa.clone());
        PrefixMatcher { index, first }
    }

    /// Longest `len <= limit` such that `text[i..i+len]` occurs starting at
    /// some `j` with `j + len <= i` (0-based). Returns `(len, leftmost j)`.
    pub(crate) fn longest_previous(&self, i: usize, limit: usize) -> (usize, usize) {
        let text = self.index.text();
        let (mut lo, mut hi) = (0, text.len());
        let mut best = (0, 0);
        for len in 1..=limit {
            let (a, b) = self.index.narrow(lo, hi, len - 1, text[i + len - 1]);
            if a >= b {
                break;
            }
            let j = self.first.min(a, b) as usize;
            if j + len > i {
                break;
            }
            best = (len, j);
            lo = a;
            hi = b;
        }
        best
    }

    /// Leftmost start of an occurrence of `text[i..i+len]` ending before
    /// `i`, searched from scratch.
    pub(crate) fn leftmost_previous(&self, i: usize, len: usize) -> Option<usize> {
        let text = self.index.text();
        let (a, b) = self.index.interval(&text[i..i + len]);
        if a >= b {
            return None;
        }
        let j = self.first.min(a, b) as usize;
        (j + len <= i).then_some(j)
    }
}

/// Greedy LZ77 parsing with non-overlapping, leftmost sources.
///
/// The copied part of a phrase never covers the final text byte, so the
/// last phrase may be shorter than the longest available copy.
pub fn parse_lz77(text: &[u8]) -> Parsing {
    let n = text.len();
    let mut phrases = Vec::new();
    if n > 0 {
        let matcher = PrefixMatcher::new(text);
        let mut i = 0;
        while i < n {
            let (len, j) = matcher.longest_previous(i, n - i - 1);
            phrases.push(Phrase {
                copy_start: if len == 0 { 0 } else { j + 1 },
                copy_len: len,
                explicit_char: text[i + len],
            });
            i += len + 1;
        }
    }
    Parsing {
        flavor: Flavor::Lz77,
        text_len: n,
        phrases,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parsing::tests::E;

    fn shape(p: &Parsing) -> Vec<(usize, usize, u8)> {
        p.phrases.iter().map(|x| (x.copy_start, x.copy_len, x.explicit_char)).collect()
    }

    #[test]
    fn example_text() {
        let p = parse_lz77(E);
        assert_eq!(
            shape(&p),
            vec![
                (0, 0, b'a'),
                (0, 0, b'l'),
                (1, 1, b'b'),
                (1, 1, b'r'),
                (0, 0, b'_'),
                (1, 1, b'_'),
                (2, 2, b'_'),
                (1, 6, b'd'),
                (1, 1, b'$'),
            ]
        );
    }

    #[test]
    fn small_cases() {
        assert!(parse_lz77(b"").is_empty());
        let p = parse_lz77(b"aaaa");
        assert_eq!(shape(&p), vec![(0, 0, b'a'), (1, 1, b'a'), (0, 0, b'a')]);
        let p = parse_lz77(b"abcdef");
        assert_eq!(p.len(), 6);
    }
}
