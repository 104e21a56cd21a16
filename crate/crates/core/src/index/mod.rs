//! The self-index: phrase boundaries, last characters, the source layout,
//! depths and the two searchable sides, built from a parsing and queried
//! without the plaintext.
//!
//! Layout of the source bitmap `S`: one zero per text position, plus a
//! leading zero standing for "position 0", with the ones of all sources
//! starting at position `t` placed right after the `t`-th zero. Empty
//! sources count as starting at position 0. A source of rank `r` therefore
//! sits at `S`-position `r + t`.

mod container;
mod extract;
mod search;

pub use container::{FORMAT_VERSION, MAGIC};
pub use extract::ExtractTrace;
pub use search::PrimaryHit;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::parsing::{compute_height, compute_source_depths, parse, Flavor, Parsing};
use crate::patricia::{reverse_keys, suffix_keys, PatriciaTree, SKIP_CHUNK_WIDTH};
use crate::succinct::bits::ceil_log2;
use crate::succinct::perm::default_period;
use crate::succinct::sparse::DEFAULT_SAMPLE_RATE;
use crate::succinct::{IntVec, Permutation, SparseBitmap, WaveletTree};

/// How the two sides of the primary search are represented, from the
/// largest to the smallest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Suffix trie and reverse trie.
    BothTries = 1,
    /// Binary search over an explicit `id` array, reverse trie.
    IdsRevTrie = 2,
    /// Suffix trie, binary search over `rev_id`.
    TrieRevIds = 3,
    /// Binary search over explicit `id` and `rev_id`.
    BothIds = 4,
    /// Binary search over `rev_id` and an `id` derived from it.
    ImplicitIds = 5,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::BothTries,
        Variant::IdsRevTrie,
        Variant::TrieRevIds,
        Variant::BothIds,
        Variant::ImplicitIds,
    ];

    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn from_number(v: u8) -> Option<Self> {
        Variant::ALL.get((v as usize).wrapping_sub(1)).copied()
    }

    fn suffix_trie(self) -> bool {
        matches!(self, Variant::BothTries | Variant::TrieRevIds)
    }

    fn reverse_trie(self) -> bool {
        matches!(self, Variant::BothTries | Variant::IdsRevTrie)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<u8>()
            .ok()
            .and_then(Variant::from_number)
            .ok_or_else(|| Error::invalid(format!("variant must be 1 to 5, got {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexConfig {
    pub flavor: Flavor,
    pub variant: Variant,
    pub sample_rate: usize,
    /// Shortcut period of the permutation; `None` picks `⌈log2 n'⌉`.
    pub perm_period: Option<usize>,
    pub dac_width: u32,
}

impl Default for IndexConfig {
    fn default() -> Self {
        IndexConfig {
            flavor: Flavor::Lz77,
            variant: Variant::ImplicitIds,
            sample_rate: DEFAULT_SAMPLE_RATE,
            perm_period: None,
            dac_width: SKIP_CHUNK_WIDTH,
        }
    }
}

impl IndexConfig {
    pub fn new(flavor: Flavor, variant: Variant) -> Self {
        IndexConfig {
            flavor,
            variant,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.sample_rate == 0 {
            return Err(Error::invalid("sample rate must be at least 1"));
        }
        if self.perm_period == Some(0) {
            return Err(Error::invalid("permutation period must be at least 1"));
        }
        if !(1..=64).contains(&self.dac_width) {
            return Err(Error::invalid("DAC chunk width must be between 1 and 64"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum SuffixSide {
    Trie(Box<PatriciaTree>),
    Ids(IntVec),
    Implicit,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum ReverseSide {
    /// Reverse trie whose payload is `rev_id`.
    Trie(Box<PatriciaTree>),
    Ids(IntVec),
}

/// Sorted, duplicate-free occurrence positions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OccurrenceSet {
    pub positions: Vec<usize>,
    pub primary_count: usize,
    pub secondary_count: usize,
}

impl OccurrenceSet {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexStats {
    pub n: usize,
    pub n_prime: usize,
    pub sigma: usize,
    pub h: usize,
    pub delta: usize,
    pub avg_c: f64,
    pub avg_depth: f64,
    /// Serialized size of each container section, in bytes.
    pub components: Vec<(String, usize)>,
    pub total_bytes: usize,
    /// Size of the plain parsing, `n'(2⌈log2 n⌉ + ⌈log2 σ⌉)` bits.
    pub lz_bits: u64,
}

impl IndexStats {
    /// Index size over the size of the plain parsing.
    pub fn ratio_to_lz(&self) -> f64 {
        (self.total_bytes * 8) as f64 / self.lz_bits.max(1) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexCore {
    pub(crate) config: IndexConfig,
    pub(crate) n: usize,
    pub(crate) n_prime: usize,
    pub(crate) sigma: usize,
    pub(crate) h: usize,
    pub(crate) delta: usize,
    pub(crate) avg_c: f64,
    /// Last byte of every phrase.
    pub(crate) lchars: Vec<u8>,
    /// Phrase ends.
    pub(crate) b: SparseBitmap,
    pub(crate) s: SparseBitmap,
    /// Phrase number to rank of its source in `S`.
    pub(crate) p: Permutation,
    /// Source depths in `S` order.
    pub(crate) dwt: WaveletTree,
    /// `R[i]`: reverse rank of the phrase preceding the `i`-th suffix.
    pub(crate) rwt: WaveletTree,
    pub(crate) suffix_side: SuffixSide,
    pub(crate) reverse_side: ReverseSide,
    /// Reverse rank of the last phrase, which has no row in `R`.
    pub(crate) last_rev_rank: usize,
}

/// Builds the index of a nonempty text.
pub fn build_index(text: &[u8], config: IndexConfig) -> Result<IndexCore> {
    let parsing = parse_for_index(text, config)?;
    build_from_parsing(text, &parsing, config)
}

fn parse_for_index(text: &[u8], config: IndexConfig) -> Result<Parsing> {
    config.validate()?;
    if text.is_empty() {
        return Err(Error::invalid("cannot index an empty text"));
    }
    Ok(parse(text, config.flavor))
}

/// Builds the index from an already computed parsing of `text`.
pub fn build_from_parsing(text: &[u8], parsing: &Parsing, config: IndexConfig) -> Result<IndexCore> {
    config.validate()?;
    if text.is_empty() {
        return Err(Error::invalid("cannot index an empty text"));
    }
    if parsing.text_len != text.len() || parsing.flavor != config.flavor {
        return Err(Error::invalid("parsing does not belong to this text and flavor"));
    }
    let n = text.len();
    let np = parsing.len();
    let ends = parsing.phrase_ends();
    let lchars: Vec<u8> = parsing.phrases.iter().map(|p| p.explicit_char).collect();
    let b = SparseBitmap::new(&ends, n, config.sample_rate)?;

    let order = parsing.source_order();
    let mut s_rank = vec![0usize; np];
    let mut s_ones = Vec::with_capacity(np);
    for (r, &k) in order.iter().enumerate() {
        s_rank[k] = r + 1;
        let t = parsing.phrases[k].source().map_or(0, |s| s.0);
        s_ones.push(r + 1 + t);
    }
    let s = SparseBitmap::new(&s_ones, n + np + 1, config.sample_rate)?;
    let period = config.perm_period.unwrap_or_else(|| default_period(np));
    let p = Permutation::new(&s_rank, period)?;

    let depths = compute_source_depths(parsing);
    let dwt = WaveletTree::new(&depths.depths.iter().map(|&d| d as u64).collect::<Vec<_>>());
    let height = compute_height(parsing);

    let sk = suffix_keys(text, parsing);
    let rk = reverse_keys(text, parsing);
    let mut rev_rank = vec![0usize; np + 1];
    for (j, &k) in rk.order.iter().enumerate() {
        rev_rank[k] = j + 1;
    }
    let r: Vec<usize> = sk
        .order
        .iter()
        .map(|&k| if k == 1 { 0 } else { rev_rank[k - 1] })
        .collect();
    let rwt = WaveletTree::from_usizes(&r);

    let suffix_side = if config.variant.suffix_trie() {
        let mut t = PatriciaTree::from_keys(&sk, config.dac_width)?;
        t.take_payload();
        SuffixSide::Trie(Box::new(t))
    } else if config.variant == Variant::ImplicitIds {
        SuffixSide::Implicit
    } else {
        SuffixSide::Ids(IntVec::from_usizes(&sk.order))
    };
    let reverse_side = if config.variant.reverse_trie() {
        ReverseSide::Trie(Box::new(PatriciaTree::from_keys(&rk, config.dac_width)?))
    } else {
        ReverseSide::Ids(IntVec::from_usizes(&rk.order))
    };

    let mut seen = [false; 256];
    text.iter().for_each(|&c| seen[c as usize] = true);
    Ok(IndexCore {
        config: IndexConfig {
            perm_period: Some(period),
            ..config
        },
        n,
        n_prime: np,
        sigma: seen.iter().filter(|&&x| x).count(),
        h: height.h,
        delta: depths.delta as usize,
        avg_c: height.avg_c,
        lchars,
        b,
        s,
        p,
        dwt,
        rwt,
        suffix_side,
        reverse_side,
        last_rev_rank: rev_rank[np],
    })
}

impl IndexCore {
    pub fn config(&self) -> IndexConfig {
        self.config
    }

    pub fn flavor(&self) -> Flavor {
        self.config.flavor
    }

    pub fn variant(&self) -> Variant {
        self.config.variant
    }

    /// Text length.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn phrase_count(&self) -> usize {
        self.n_prime
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn max_depth(&self) -> usize {
        self.delta
    }

    pub fn last_chars(&self) -> &[u8] {
        &self.lchars
    }

    pub fn phrase_end_bitmap(&self) -> &SparseBitmap {
        &self.b
    }

    pub fn source_bitmap(&self) -> &SparseBitmap {
        &self.s
    }

    pub fn source_permutation(&self) -> &Permutation {
        &self.p
    }

    pub fn depths(&self) -> &WaveletTree {
        &self.dwt
    }

    pub fn ranges(&self) -> &WaveletTree {
        &self.rwt
    }

    fn check_phrase(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n_prime {
            return Err(Error::range("phrase", k, 1, self.n_prime));
        }
        Ok(())
    }

    /// 1-based first and last text positions of phrase `k`.
    pub fn phrase_bounds(&self, k: usize) -> Result<(usize, usize)> {
        self.check_phrase(k)?;
        let (prev, end) = self.b.select1_pair(k)?;
        Ok((prev + 1, end))
    }

    /// 1-based start of the source of phrase `k`, 0 when it is empty.
    pub fn source_start(&self, k: usize) -> Result<usize> {
        self.check_phrase(k)?;
        let r = self.p.apply(k)?;
        Ok(self.s.select1(r)? - r)
    }

    /// Phrase number of the reversed phrase at 1-based rank `j`.
    pub fn rev_id(&self, j: usize) -> Result<usize> {
        self.check_phrase(j)?;
        Ok(match &self.reverse_side {
            ReverseSide::Trie(t) => t.payload(j).ok_or_else(|| Error::invalid("reverse trie without payload"))?,
            ReverseSide::Ids(v) => v.get(j - 1) as usize,
        })
    }

    /// Phrase number of the suffix at 1-based rank `i`.
    pub fn id(&self, i: usize) -> Result<usize> {
        self.check_phrase(i)?;
        if let SuffixSide::Ids(v) = &self.suffix_side {
            return Ok(v.get(i - 1) as usize);
        }
        match self.rwt.access(i)? as usize {
            0 => Ok(1),
            j => Ok(self.rev_id(j)? + 1),
        }
    }

    /// Node counts of the suffix and reverse tries, where present.
    pub fn trie_node_counts(&self) -> (Option<usize>, Option<usize>) {
        let suffix = match &self.suffix_side {
            SuffixSide::Trie(t) => Some(t.node_count()),
            _ => None,
        };
        let reverse = match &self.reverse_side {
            ReverseSide::Trie(t) => Some(t.node_count()),
            ReverseSide::Ids(_) => None,
        };
        (suffix, reverse)
    }

    pub fn stats(&self) -> IndexStats {
        let sections = self.sections();
        let total_bytes = self.serialize().len();
        let avg_depth = if self.n_prime == 0 {
            0.0
        } else {
            (1..=self.n_prime)
                .map(|s| self.dwt.access(s).unwrap_or(0) as f64)
                .sum::<f64>()
                / self.n_prime as f64
        };
        let per_phrase = 2 * ceil_log2(self.n as u64) as u64 + ceil_log2(self.sigma as u64) as u64;
        IndexStats {
            n: self.n,
            n_prime: self.n_prime,
            sigma: self.sigma,
            h: self.h,
            delta: self.delta,
            avg_c: self.avg_c,
            avg_depth,
            components: sections
                .into_iter()
                .map(|(tag, body)| (String::from_utf8_lossy(&tag).trim_end().to_string(), body.len()))
                .collect(),
            total_bytes,
            lz_bits: self.n_prime as u64 * per_phrase,
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::parsing::tests::E;

    pub(crate) fn e_index(variant: Variant) -> IndexCore {
        build_index(E, IndexConfig::new(Flavor::Lz77, variant)).unwrap()
    }

    #[test]
    fn structures_of_example() {
        let idx = e_index(Variant::BothTries);
        assert_eq!(idx.last_chars(), b"albr___d$");
        assert_eq!(idx.b.ones().collect::<Vec<_>>(), vec![1, 2, 4, 6, 7, 9, 12, 19, 21]);
        assert_eq!(idx.s.len(), 31);
        assert_eq!(idx.s.ones().collect::<Vec<_>>(), vec![1, 2, 3, 5, 6, 7, 8, 9, 11]);
        let p: Vec<usize> = (1..=9).map(|k| idx.p.apply(k).unwrap()).collect();
        assert_eq!(p, vec![1, 2, 4, 5, 3, 6, 9, 8, 7]);
        let d: Vec<u64> = (1..=9).map(|s| idx.dwt.access(s).unwrap()).collect();
        assert_eq!(d, vec![0, 0, 0, 0, 0, 0, 0, 0, 1]);
        let r: Vec<u64> = (1..=9).map(|i| idx.rwt.access(i).unwrap()).collect();
        assert_eq!(r, vec![9, 7, 2, 8, 0, 4, 6, 3, 5]);
        assert_eq!(idx.source_start(8).unwrap(), 1);
        assert_eq!(idx.source_start(7).unwrap(), 2);
        assert_eq!(idx.source_start(5).unwrap(), 0);
        assert_eq!(idx.phrase_bounds(8).unwrap(), (13, 19));
        assert_eq!(idx.s.select0(3).unwrap(), 12);
    }

    #[test]
    fn ids_agree_across_variants() {
        let want_id = vec![5, 9, 6, 3, 1, 8, 4, 7, 2];
        let want_rev = vec![9, 5, 6, 7, 1, 3, 8, 2, 4];
        for v in Variant::ALL {
            let idx = e_index(v);
            let id: Vec<usize> = (1..=9).map(|i| idx.id(i).unwrap()).collect();
            let rev: Vec<usize> = (1..=9).map(|j| idx.rev_id(j).unwrap()).collect();
            assert_eq!(id, want_id, "variant {v}");
            assert_eq!(rev, want_rev, "variant {v}");
        }
    }

    #[test]
    fn single_byte_text() {
        let idx = build_index(b"a", IndexConfig::default()).unwrap();
        assert_eq!(idx.phrase_count(), 1);
        assert_eq!(idx.last_chars(), b"a");
        assert_eq!(idx.s.len(), 3);
        assert_eq!(idx.s.ones().collect::<Vec<_>>(), vec![1]);
        assert_eq!(idx.rwt.access(1).unwrap(), 0);
        let st = idx.stats();
        assert_eq!((st.n, st.n_prime, st.h, st.delta), (1, 1, 1, 0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(build_index(b"", IndexConfig::default()), Err(Error::Invalid(_))));
        let bad = IndexConfig {
            sample_rate: 0,
            ..Default::default()
        };
        assert!(build_index(b"abc", bad).is_err());
        assert!("6".parse::<Variant>().is_err());
        assert_eq!("3".parse::<Variant>().unwrap(), Variant::TrieRevIds);
        assert_eq!(Variant::from_number(0), None);
    }

    #[test]
    fn stats_of_example() {
        let st = e_index(Variant::ImplicitIds).stats();
        assert_eq!((st.n, st.n_prime, st.h, st.delta), (21, 9, 3, 1));
        assert_eq!(st.sigma, 7);
        // 9 * (2 * 5 + 3)
        assert_eq!(st.lz_bits, 117);
        assert!((st.avg_depth - 1.0 / 9.0).abs() < 1e-12);
        assert!(st.components.iter().any(|(name, _)| name == "META"));
    }
}
