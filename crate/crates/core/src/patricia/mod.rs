//! Skip-compressed tries over a sorted set of byte strings, with blind
//! descent, plus a binary-search alternative over the same sorted order.
//!
//! Strings are implicitly terminated by a symbol smaller than every byte,
//! so a string that is a prefix of another gets its own leaf. Equal
//! strings share one leaf that spans several ranks.

mod binsearch;
mod build;

pub use binsearch::{binsearch_range, compare_prefix};
pub use build::{build_reverse_tree, build_suffix_tree, reverse_keys, suffix_keys, TextKeys};

use std::cmp::Ordering;

use crate::error::{LoadError, Result};
use crate::serial::{self, malformed, Decode, Encode, Reader};
use crate::succinct::{Dac, IntVec};

pub const SKIP_CHUNK_WIDTH: u32 = 4;

/// Read access to the strings of a sorted key set, by 1-based rank.
pub trait KeyAccess {
    fn count(&self) -> usize;
    fn key_len(&self, rank: usize) -> Result<usize>;
    /// The first `len` bytes of the string (`len <= key_len`).
    fn key_prefix(&self, rank: usize, len: usize) -> Result<Vec<u8>>;

    /// The first `min(key_len, max_len)` bytes.
    fn key_head(&self, rank: usize, max_len: usize) -> Result<Vec<u8>> {
        let take = self.key_len(rank)?.min(max_len);
        self.key_prefix(rank, take)
    }

    /// Byte at 0-based `pos`, or `None` past the end.
    fn key_byte(&self, rank: usize, pos: usize) -> Result<Option<u8>> {
        if pos >= self.key_len(rank)? {
            return Ok(None);
        }
        Ok(self.key_prefix(rank, pos + 1)?.pop())
    }
}

/// A range of 1-based leaf ranks; `lo > hi` means empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchRange {
    pub lo: usize,
    pub hi: usize,
    /// False when a blind descent may have skipped unmatched key bytes.
    pub verified: bool,
}

impl SearchRange {
    pub fn new(lo: usize, hi: usize, verified: bool) -> Self {
        SearchRange { lo, hi, verified }
    }

    pub fn empty(verified: bool) -> Self {
        SearchRange { lo: 1, hi: 0, verified }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn len(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.hi - self.lo + 1
        }
    }

    pub fn contains(&self, rank: usize) -> bool {
        self.lo <= rank && rank <= self.hi
    }
}

/// Compact trie in breadth-first order. The children of node `v` are the
/// consecutive nodes `child_start[v]..child_start[v + 1]`, sorted by the
/// label of their incoming edge (0 for the terminator, `byte + 1`
/// otherwise). The root is node 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PatriciaTree {
    child_start: IntVec,
    labels: IntVec,
    /// String depth of a node minus that of its parent, minus one.
    skips: Dac,
    leaf_lo: IntVec,
    leaf_hi: IntVec,
    leaf_count: usize,
    payload: Option<IntVec>,
}

struct TmpNode {
    depth: usize,
    children: Vec<usize>,
    lo: usize,
    hi: usize,
}

impl PatriciaTree {
    /// Builds the trie of `lens.len()` strings given in sorted order.
    /// `lcps[r]` is the common prefix length of strings `r - 1` and `r`
    /// (0-based, `lcps[0]` ignored) and `byte_at(rank, pos)` returns byte
    /// `pos` of the string of 1-based `rank`.
    pub fn from_sorted(
        lens: &[usize],
        lcps: &[usize],
        skip_width: u32,
        byte_at: impl Fn(usize, usize) -> u8,
    ) -> Result<Self> {
        let m = lens.len();
        debug_assert_eq!(lcps.len(), m);
        let mut nodes = vec![TmpNode {
            depth: 0,
            children: Vec::new(),
            lo: 1,
            hi: m,
        }];
        let mut stack = vec![0usize];
        let mut r = 0;
        while r < m {
            let mut q = r + 1;
            while q < m && lcps[q] == lens[r] && lens[q] == lens[r] {
                q += 1;
            }
            let l = if r == 0 { 0 } else { lcps[r] };
            let mut popped = None;
            while nodes[*stack.last().unwrap()].depth > l {
                popped = stack.pop();
            }
            let top = *stack.last().unwrap();
            if nodes[top].depth < l {
                let p = popped.expect("a deeper node was popped");
                let fresh = nodes.len();
                nodes.push(TmpNode {
                    depth: l,
                    children: vec![p],
                    lo: 0,
                    hi: 0,
                });
                *nodes[top].children.last_mut().unwrap() = fresh;
                stack.push(fresh);
            }
            let leaf = nodes.len();
            nodes.push(TmpNode {
                depth: lens[r] + 1,
                children: Vec::new(),
                lo: r + 1,
                hi: q,
            });
            let parent = *stack.last().unwrap();
            nodes[parent].children.push(leaf);
            stack.push(leaf);
            r = q;
        }

        let mut order = vec![0usize];
        let mut i = 0;
        while i < order.len() {
            order.extend_from_slice(&nodes[order[i]].children);
            i += 1;
        }
        for &v in order.iter().rev() {
            if let (Some(&a), Some(&b)) = (nodes[v].children.first(), nodes[v].children.last()) {
                nodes[v].lo = nodes[a].lo;
                nodes[v].hi = nodes[b].hi;
            }
        }

        let count = order.len();
        let mut child_start = Vec::with_capacity(count + 1);
        let mut labels = vec![0u64; count];
        let mut skips = vec![0u64; count];
        let mut next = 1;
        for (bfs, &v) in order.iter().enumerate() {
            child_start.push(next);
            next += nodes[v].children.len();
            let d = nodes[v].depth;
            for (off, &u) in nodes[v].children.iter().enumerate() {
                let lo = nodes[u].lo;
                labels[child_start[bfs] + off] = if d == lens[lo - 1] {
                    0
                } else {
                    byte_at(lo, d) as u64 + 1
                };
                skips[child_start[bfs] + off] = (nodes[u].depth - d - 1) as u64;
            }
        }
        child_start.push(next);
        let lo: Vec<usize> = order.iter().map(|&v| nodes[v].lo).collect();
        let hi: Vec<usize> = order.iter().map(|&v| nodes[v].hi).collect();
        let mut labels_iv = IntVec::new(9);
        labels.iter().for_each(|&l| labels_iv.push(l));
        Ok(PatriciaTree {
            child_start: IntVec::from_usizes(&child_start),
            labels: labels_iv,
            skips: Dac::new(&skips, skip_width)?,
            leaf_lo: IntVec::from_usizes(&lo),
            leaf_hi: IntVec::from_usizes(&hi),
            leaf_count: m,
            payload: None,
        })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    fn children(&self, v: usize) -> (usize, usize) {
        (self.child_start.get(v) as usize, self.child_start.get(v + 1) as usize)
    }

    pub fn child_count(&self, v: usize) -> usize {
        let (a, b) = self.children(v);
        b - a
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        v != 0 && self.child_count(v) == 0
    }

    pub fn label(&self, v: usize) -> u64 {
        self.labels.get(v)
    }

    pub fn skip(&self, v: usize) -> usize {
        self.skips.get(v).expect("node index within tree") as usize
    }

    pub fn skips(&self) -> Vec<u64> {
        (0..self.node_count()).map(|v| self.skip(v) as u64).collect()
    }

    pub fn node_range(&self, v: usize) -> SearchRange {
        SearchRange::new(self.leaf_lo.get(v) as usize, self.leaf_hi.get(v) as usize, false)
    }

    fn child_with_label(&self, v: usize, label: u64) -> Option<usize> {
        let (mut a, mut b) = self.children(v);
        while a < b {
            let mid = (a + b) / 2;
            match self.labels.get(mid).cmp(&label) {
                Ordering::Less => a = mid + 1,
                Ordering::Greater => b = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Blind descent: follows the first byte of every edge and skips the
    /// rest without looking at it. If some string has `key` as a prefix,
    /// the range is exactly those strings; otherwise it may be nonempty
    /// and wrong, so callers verify one candidate.
    pub fn search(&self, key: &[u8]) -> SearchRange {
        let (mut v, mut depth) = (0usize, 0usize);
        loop {
            if depth >= key.len() {
                let r = self.node_range(v);
                return if r.is_empty() { SearchRange::empty(false) } else { r };
            }
            let Some(u) = self.child_with_label(v, key[depth] as u64 + 1) else {
                return SearchRange::empty(false);
            };
            let du = depth + 1 + self.skip(u);
            if self.is_leaf(u) {
                // a leaf's depth counts the terminator
                return if du > key.len() {
                    self.node_range(u)
                } else {
                    SearchRange::empty(false)
                };
            }
            v = u;
            depth = du;
        }
    }

    pub fn set_payload(&mut self, ids: &[usize]) {
        debug_assert_eq!(ids.len(), self.leaf_count);
        self.payload = Some(IntVec::from_usizes(ids));
    }

    pub fn take_payload(&mut self) -> Option<Vec<usize>> {
        self.payload
            .take()
            .map(|p| p.iter().map(|x| x as usize).collect())
    }

    pub fn has_payload(&self) -> bool {
        self.payload.is_some()
    }

    /// Stored identifier of the string at 1-based `rank`.
    pub fn payload(&self, rank: usize) -> Option<usize> {
        self.payload.as_ref().map(|p| p.get(rank - 1) as usize)
    }
}

/// Recomputes every skip by reading the strings one byte at a time: the
/// depth of an internal node is the common prefix of its leftmost and
/// rightmost strings, and a leaf's depth is its length plus the
/// terminator.
pub fn compute_skips(tree: &PatriciaTree, keys: &impl KeyAccess) -> Result<Vec<u64>> {
    let count = tree.node_count();
    let mut depth = vec![0usize; count];
    let mut skips = vec![0u64; count];
    for v in 0..count {
        let (a, b) = tree.children(v);
        for u in a..b {
            let range = tree.node_range(u);
            let du = if tree.is_leaf(u) {
                keys.key_len(range.lo)? + 1
            } else {
                let mut pos = depth[v] + 1;
                while keys.key_byte(range.lo, pos)? == keys.key_byte(range.hi, pos)? {
                    pos += 1;
                }
                pos
            };
            depth[u] = du;
            skips[u] = (du - depth[v] - 1) as u64;
        }
    }
    Ok(skips)
}

impl Encode for PatriciaTree {
    fn encode(&self, out: &mut Vec<u8>) {
        serial::put_len(out, self.leaf_count);
        self.child_start.encode(out);
        self.labels.encode(out);
        self.skips.encode(out);
        self.leaf_lo.encode(out);
        self.leaf_hi.encode(out);
        match &self.payload {
            Some(p) => {
                serial::put_u8(out, 1);
                p.encode(out);
            }
            None => serial::put_u8(out, 0),
        }
    }
}

impl Decode for PatriciaTree {
    fn decode(r: &mut Reader) -> std::result::Result<Self, LoadError> {
        let leaf_count = r.len("trie leaf count")?;
        let child_start = IntVec::decode(r)?;
        let labels = IntVec::decode(r)?;
        let skips = Dac::decode(r)?;
        let leaf_lo = IntVec::decode(r)?;
        let leaf_hi = IntVec::decode(r)?;
        let payload = match r.u8("trie payload flag")? {
            0 => None,
            1 => Some(IntVec::decode(r)?),
            f => return Err(malformed(format!("trie payload flag {f}"))),
        };
        let count = labels.len();
        if count == 0
            || child_start.len() != count + 1
            || skips.len() != count
            || leaf_lo.len() != count
            || leaf_hi.len() != count
            || payload.as_ref().is_some_and(|p| p.len() != leaf_count)
        {
            return Err(malformed("trie arrays disagree in length"));
        }
        let mut prev = child_start.get(0);
        if prev != 1 || child_start.get(count) != count as u64 {
            return Err(malformed("trie child offsets"));
        }
        for i in 1..=count {
            let c = child_start.get(i);
            if c < prev {
                return Err(malformed("trie child offsets"));
            }
            prev = c;
        }
        if leaf_lo.iter().any(|x| x == 0) || leaf_hi.iter().any(|x| x as usize > leaf_count) {
            return Err(malformed("trie leaf rank"));
        }
        Ok(PatriciaTree {
            child_start,
            labels,
            skips,
            leaf_lo,
            leaf_hi,
            leaf_count,
            payload,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parsing::tests::E;
    use crate::parsing::{parse_lz77, Parsing};

    fn strings_tree(strs: &[&[u8]]) -> PatriciaTree {
        let mut sorted: Vec<&[u8]> = strs.to_vec();
        sorted.sort();
        let lens: Vec<usize> = sorted.iter().map(|s| s.len()).collect();
        let mut lcps = vec![0];
        for w in sorted.windows(2) {
            lcps.push(w[0].iter().zip(w[1]).take_while(|(a, b)| a == b).count());
        }
        PatriciaTree::from_sorted(&lens, &lcps, SKIP_CHUNK_WIDTH, |r, p| sorted[r - 1][p]).unwrap()
    }

    #[test]
    fn suffix_tree_of_example() {
        let p = parse_lz77(E);
        let t = build_suffix_tree(E, &p).unwrap();
        let r = t.search(b"la");
        assert_eq!((r.lo, r.hi, r.verified), (8, 9, false));
        assert!(t.search(b"z").is_empty());
        assert_eq!(t.search(b""), SearchRange::new(1, 9, false));
        let ids: Vec<usize> = (1..=9).map(|k| t.payload(k).unwrap()).collect();
        assert_eq!(ids, vec![5, 9, 6, 3, 1, 8, 4, 7, 2]);
        assert!(t.node_count() <= 2 * p.len());
        // the 'l' child of the root sits at depth 2 ("la")
        let l = t.child_with_label(0, b'l' as u64 + 1).unwrap();
        assert_eq!(1 + t.skip(l), 2);
    }

    #[test]
    fn reverse_tree_of_example() {
        let p = parse_lz77(E);
        let t = build_reverse_tree(E, &p).unwrap();
        let r = t.search(b"a");
        assert_eq!((r.lo, r.hi), (5, 5));
        let rev: Vec<usize> = (1..=9).map(|k| t.payload(k).unwrap()).collect();
        assert_eq!(rev, vec![9, 5, 6, 7, 1, 3, 8, 2, 4]);
        assert_eq!(t.search(b"_a"), SearchRange::new(3, 4, false));
    }

    #[test]
    fn tiny_texts() {
        let p = parse_lz77(b"a");
        let t = build_suffix_tree(b"a", &p).unwrap();
        assert_eq!(t.payload(1), Some(1));
        let p = parse_lz77(b"aaaa");
        let t = build_suffix_tree(b"aaaa", &p).unwrap();
        let ids: Vec<usize> = (1..=3).map(|k| t.payload(k).unwrap()).collect();
        assert_eq!(ids, vec![3, 2, 1]);
        // "aaaa" has phrases a|aa|a: reversed phrases a, aa, a
        let t = build_reverse_tree(b"aaaa", &p).unwrap();
        assert_eq!(t.search(b"a"), SearchRange::new(1, 3, false));
        assert_eq!(t.search(b"aa"), SearchRange::new(3, 3, false));
        assert!(t.search(b"aaa").is_empty());
    }

    #[test]
    fn duplicate_strings_share_a_leaf() {
        let t = strings_tree(&[b"ab", b"a", b"ab", b"b"]);
        assert_eq!(t.search(b"ab"), SearchRange::new(2, 3, false));
        assert_eq!(t.search(b"a"), SearchRange::new(1, 3, false));
        assert_eq!(t.leaf_count(), 4);
        // root, 'a' node, terminator leaf, "ab" leaf, "b" leaf
        assert_eq!(t.node_count(), 5);
    }

    #[test]
    fn blind_search_can_be_wrong() {
        let t = strings_tree(&[b"abc", b"abd"]);
        // the skipped 'b' is never compared
        assert_eq!(t.search(b"axc"), SearchRange::new(1, 1, false));
        assert_eq!(t.search(b"ab"), SearchRange::new(1, 2, false));
        assert!(t.search(b"abcde").is_empty());
    }

    #[test]
    fn empty_key_set() {
        let t = PatriciaTree::from_sorted(&[], &[], SKIP_CHUNK_WIDTH, |_, _| 0).unwrap();
        assert!(t.search(b"").is_empty());
        assert!(t.search(b"a").is_empty());
    }

    #[test]
    fn skips_cross_check_and_codec() {
        let p: Parsing = parse_lz77(E);
        let t = build_suffix_tree(E, &p).unwrap();
        assert_eq!(compute_skips(&t, &suffix_keys(E, &p)).unwrap(), t.skips());
        let r = build_reverse_tree(E, &p).unwrap();
        assert_eq!(compute_skips(&r, &reverse_keys(E, &p)).unwrap(), r.skips());
        let mut buf = Vec::new();
        r.encode(&mut buf);
        let back = PatriciaTree::decode(&mut Reader::new(&buf)).unwrap();
        assert_eq!(back, r);
        assert!(PatriciaTree::decode(&mut Reader::new(&buf[..buf.len() - 3])).is_err());
    }
}

#[cfg(test)]
mod proptests {
    use proptest::prelude::*;

    use super::*;
    use crate::parsing::{parse, Flavor};

    fn naive_range(keys: &impl KeyAccess, key: &[u8]) -> Option<(usize, usize)> {
        let hits: Vec<usize> = (1..=keys.count())
            .filter(|&r| {
                let len = keys.key_len(r).unwrap();
                len >= key.len() && keys.key_prefix(r, key.len()).unwrap() == key
            })
            .collect();
        hits.first().map(|&a| (a, *hits.last().unwrap()))
    }

    fn check(tree: &PatriciaTree, keys: &impl KeyAccess, key: &[u8]) -> Result<(), TestCaseError> {
        let naive = naive_range(keys, key);
        let bin = binsearch_range(keys, key).unwrap();
        prop_assert_eq!(naive, (!bin.is_empty()).then_some((bin.lo, bin.hi)));
        let blind = tree.search(key);
        if let Some((a, b)) = naive {
            prop_assert_eq!((blind.lo, blind.hi), (a, b));
        } else if !blind.is_empty() {
            // a wrong guess must fail verification on any candidate
            let r = blind.lo;
            let len = keys.key_len(r).unwrap();
            prop_assert!(len < key.len() || keys.key_prefix(r, key.len()).unwrap() != key);
        }
        Ok(())
    }

    proptest! {
        #[test]
        fn tries_agree_with_sorting_and_scans(
            text in (1u8..=4, 1usize..300).prop_flat_map(|(s, n)| proptest::collection::vec(b'a'..b'a' + s, n)),
            end in any::<bool>(),
            probes in proptest::collection::vec((any::<usize>(), 0usize..12, any::<bool>()), 16),
        ) {
            let p = parse(&text, if end { Flavor::LzEnd } else { Flavor::Lz77 });
            let sk = suffix_keys(&text, &p);
            let rk = reverse_keys(&text, &p);
            let st = build_suffix_tree(&text, &p).unwrap();
            let rt = build_reverse_tree(&text, &p).unwrap();
            prop_assert!(st.node_count() <= 2 * p.len());
            prop_assert!(rt.node_count() <= 2 * p.len());
            prop_assert_eq!(compute_skips(&st, &sk).unwrap(), st.skips());
            prop_assert_eq!(compute_skips(&rt, &rk).unwrap(), rt.skips());

            // leaf orders against a general-purpose sort
            let starts = p.phrase_starts();
            let mut by_sort: Vec<usize> = (1..=p.len()).collect();
            by_sort.sort_by(|&a, &b| text[starts[a - 1] - 1..].cmp(&text[starts[b - 1] - 1..]));
            prop_assert_eq!(&sk.order, &by_sort);
            let ends = p.phrase_ends();
            let rev = |k: usize| -> Vec<u8> { text[starts[k - 1] - 1..ends[k - 1]].iter().rev().copied().collect() };
            let mut by_sort: Vec<usize> = (1..=p.len()).collect();
            by_sort.sort_by(|&a, &b| rev(a).cmp(&rev(b)).then(a.cmp(&b)));
            prop_assert_eq!(&rk.order, &by_sort);

            for &(at, len, mutate) in &probes {
                let at = at % text.len();
                let mut key = text[at..(at + len).min(text.len())].to_vec();
                if mutate && !key.is_empty() {
                    let i = at % key.len();
                    key[i] = key[i].wrapping_add(1);
                }
                check(&st, &sk, &key)?;
                let mut rkey = key.clone();
                rkey.reverse();
                check(&rt, &rk, &rkey)?;
            }
        }
    }
}
