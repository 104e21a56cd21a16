use crate::error::Result;
use crate::parsing::Parsing;
use crate::suffix::SuffixIndex;

use super::{KeyAccess, PatriciaTree, SKIP_CHUNK_WIDTH};

/// Phrase strings read straight from the plaintext, in sorted order. Used
/// at build time and by tests; query-time accessors go through the index.
pub struct TextKeys<'a> {
    text: &'a [u8],
    /// `(0-based anchor, length)` per rank. Suffix keys read forward from
    /// the anchor, reversed keys read backward from it.
    keys: Vec<(usize, usize)>,
    reversed: bool,
    /// Phrase number of each rank.
    pub order: Vec<usize>,
    /// Common prefix length with the previous rank (0 for the first).
    pub lcps: Vec<usize>,
}

impl KeyAccess for TextKeys<'_> {
    fn count(&self) -> usize {
        self.keys.len()
    }

    fn key_len(&self, rank: usize) -> Result<usize> {
        Ok(self.keys[rank - 1].1)
    }

    fn key_prefix(&self, rank: usize, len: usize) -> Result<Vec<u8>> {
        let (a, _) = self.keys[rank - 1];
        Ok(if self.reversed {
            self.text[a + 1 - len..=a].iter().rev().copied().collect()
        } else {
            self.text[a..a + len].to_vec()
        })
    }

    fn key_byte(&self, rank: usize, pos: usize) -> Result<Option<u8>> {
        let (a, len) = self.keys[rank - 1];
        Ok((pos < len).then(|| if self.reversed { self.text[a - pos] } else { self.text[a + pos] }))
    }
}

/// Suffixes of `text` starting at phrase starts, sorted.
pub fn suffix_keys<'a>(text: &'a [u8], parsing: &Parsing) -> TextKeys<'a> {
    let si = SuffixIndex::new(text);
    let mut order: Vec<usize> = (1..=parsing.len()).collect();
    let starts = parsing.phrase_starts();
    order.sort_by_key(|&k| si.rank[starts[k - 1] - 1]);
    let keys: Vec<(usize, usize)> = order
        .iter()
        .map(|&k| (starts[k - 1] - 1, text.len() + 1 - starts[k - 1]))
        .collect();
    let lcps = (0..keys.len())
        .map(|r| if r == 0 { 0 } else { si.lcp_positions(keys[r - 1].0, keys[r].0) })
        .collect();
    TextKeys {
        text,
        keys,
        reversed: false,
        order,
        lcps,
    }
}

/// Phrases read backwards, sorted; equal strings by phrase number.
pub fn reverse_keys<'a>(text: &'a [u8], parsing: &Parsing) -> TextKeys<'a> {
    let n = text.len();
    let reversed: Vec<u8> = text.iter().rev().copied().collect();
    let si = SuffixIndex::new(&reversed);
    let ends = parsing.phrase_ends();
    let lens: Vec<usize> = parsing.phrases.iter().map(|p| p.len()).collect();
    // a phrase ending at 1-based e reads backwards from reversed[n - e]
    let anchor = |k: usize| n - ends[k - 1];
    let mut order: Vec<usize> = (1..=parsing.len()).collect();
    order.sort_by(|&a, &b| {
        let (la, lb) = (lens[a - 1], lens[b - 1]);
        let common = si.lcp_positions(anchor(a), anchor(b)).min(la).min(lb);
        if common < la.min(lb) {
            reversed[anchor(a) + common].cmp(&reversed[anchor(b) + common])
        } else {
            la.cmp(&lb).then(a.cmp(&b))
        }
    });
    let keys: Vec<(usize, usize)> = order.iter().map(|&k| (ends[k - 1] - 1, lens[k - 1])).collect();
    let lcps = (0..keys.len())
        .map(|r| {
            if r == 0 {
                return 0;
            }
            let ((ea, la), (eb, lb)) = (keys[r - 1], keys[r]);
            si.lcp_positions(n - 1 - ea, n - 1 - eb).min(la).min(lb)
        })
        .collect();
    TextKeys {
        text,
        keys,
        reversed: true,
        order,
        lcps,
    }
}

impl PatriciaTree {
    /// Trie over sorted plaintext keys, with their phrase numbers as the
    /// leaf payload.
    pub fn from_keys(keys: &TextKeys, skip_width: u32) -> Result<Self> {
        let lens: Vec<usize> = keys.keys.iter().map(|k| k.1).collect();
        let mut tree = PatriciaTree::from_sorted(&lens, &keys.lcps, skip_width, |rank, pos| {
            keys.key_byte(rank, pos).ok().flatten().expect("byte within key")
        })?;
        tree.set_payload(&keys.order);
        Ok(tree)
    }
}

/// Trie over the text suffixes that start at phrase starts. The payload
/// holds the phrase number of every leaf.
pub fn build_suffix_tree(text: &[u8], parsing: &Parsing) -> Result<PatriciaTree> {
    PatriciaTree::from_keys(&suffix_keys(text, parsing), SKIP_CHUNK_WIDTH)
}

/// Trie over the reversed phrases. The payload holds the phrase number of
/// every leaf.
pub fn build_reverse_tree(text: &[u8], parsing: &Parsing) -> Result<PatriciaTree> {
    PatriciaTree::from_keys(&reverse_keys(text, parsing), SKIP_CHUNK_WIDTH)
}
