//! Brute-force reference implementations. Nothing here touches the
//! succinct structures, the tries or the index: these routines scan the
//! plaintext directly and exist to check the real implementation.

use crate::error::{Error, Result};
use crate::parsing::{Flavor, Parsing, Phrase};

/// Plain text held for reference queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaiveText(pub Vec<u8>);

impl NaiveText {
    pub fn new(text: impl Into<Vec<u8>>) -> Self {
        NaiveText(text.into())
    }

    pub fn locate(&self, p: &[u8]) -> Result<Vec<usize>> {
        naive_locate(&self.0, p)
    }

    pub fn extract(&self, s: usize, e: usize) -> &[u8] {
        &self.0[s - 1..e]
    }
}

/// Every 1-based start of `p` in `text`, ascending.
pub fn naive_locate(text: &[u8], p: &[u8]) -> Result<Vec<usize>> {
    if p.is_empty() {
        return Err(Error::invalid("empty pattern"));
    }
    if p.len() > text.len() {
        return Ok(Vec::new());
    }
    Ok(text
        .windows(p.len())
        .enumerate()
        .filter(|(_, w)| *w == p)
        .map(|(i, _)| i + 1)
        .collect())
}

fn phrase_ends(parsing: &Parsing) -> Vec<usize> {
    let mut acc = 0;
    parsing
        .phrases
        .iter()
        .map(|ph| {
            acc += ph.copy_len + 1;
            acc
        })
        .collect()
}

/// Splits the occurrences of `p` into primary ones (containing a phrase
/// end) and secondary ones (strictly inside a phrase).
pub fn naive_classify(text: &[u8], parsing: &Parsing, p: &[u8]) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut is_end = vec![false; text.len() + 1];
    for e in phrase_ends(parsing) {
        is_end[e] = true;
    }
    let (mut primary, mut secondary) = (Vec::new(), Vec::new());
    for x in naive_locate(text, p)? {
        if (x..x + p.len()).any(|e| is_end[e]) {
            primary.push(x);
        } else {
            secondary.push(x);
        }
    }
    Ok((primary, secondary))
}

/// Source start, length and phrase index.
type Source = (usize, usize, usize);

/// Source depths by the pairwise cover relation, in source order (empty
/// sources first, then by start, length and phrase number).
pub fn naive_depths(parsing: &Parsing) -> Vec<u32> {
    let mut sources: Vec<(usize, usize, usize)> = parsing
        .phrases
        .iter()
        .enumerate()
        .map(|(k, ph)| {
            if ph.copy_len == 0 {
                (0, 0, k)
            } else {
                (ph.copy_start, ph.copy_len, k)
            }
        })
        .collect();
    sources.sort();
    let covers = |a: (usize, usize, usize), b: (usize, usize, usize)| {
        a.1 > 0 && b.1 > 0 && a.0 < b.0 && a.0 + a.1 >= b.0 + b.1
    };
    let mut memo: Vec<Option<u32>> = vec![None; sources.len()];
    fn depth(
        i: usize,
        sources: &[Source],
        memo: &mut Vec<Option<u32>>,
        covers: &dyn Fn(Source, Source) -> bool,
    ) -> u32 {
        if let Some(d) = memo[i] {
            return d;
        }
        let mut best: Option<u32> = None;
        for j in 0..sources.len() {
            if covers(sources[j], sources[i]) {
                let d = depth(j, sources, memo, covers);
                best = Some(best.map_or(d, |b| b.max(d)));
            }
        }
        let d = best.map_or(0, |b| b + 1);
        memo[i] = Some(d);
        d
    }
    (0..sources.len()).map(|i| depth(i, &sources, &mut memo, &covers)).collect()
}

/// Largest `s' < s` (1-based) with `seq[s'] < d`.
pub fn naive_prev_less(seq: &[u64], s: usize, d: u64) -> Option<usize> {
    (1..s.min(seq.len() + 1)).rev().find(|&q| seq[q - 1] < d)
}

/// Length of the longest prefix of `text[i..]` (capped at `limit`) that
/// occurs starting at some `j` with `j + len <= i`, and the leftmost such
/// `j` (0-based).
fn longest_previous(text: &[u8], i: usize, limit: usize) -> (usize, usize) {
    let mut best = (0, 0);
    for j in 0..i {
        let cap = limit.min(i - j);
        let mut l = 0;
        while l < cap && text[j + l] == text[i + l] {
            l += 1;
        }
        if l > best.0 {
            best = (l, j);
        }
    }
    best
}

/// Greedy LZ77 parsing by direct comparison against every earlier start.
pub fn naive_lz77(text: &[u8]) -> Parsing {
    let n = text.len();
    let mut phrases = Vec::new();
    let mut i = 0;
    while i < n {
        let (len, j) = longest_previous(text, i, n - i - 1);
        phrases.push(Phrase {
            copy_start: if len == 0 { 0 } else { j + 1 },
            copy_len: len,
            explicit_char: text[i + len],
        });
        i += len + 1;
    }
    Parsing {
        flavor: Flavor::Lz77,
        text_len: n,
        phrases,
    }
}

const HASH_MOD: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % HASH_MOD as u128) as u64
}

/// Greedy LZ-End parsing: for each phrase, try every copy length from the
/// longest previous factor downwards against every earlier phrase end.
pub fn naive_lzend(text: &[u8]) -> Parsing {
    let n = text.len();
    let base = 1_000_003u64;
    let mut pre = vec![0u64; n + 1];
    let mut pw = vec![1u64; n + 1];
    for i in 0..n {
        pre[i + 1] = (mul_mod(pre[i], base) + text[i] as u64 + 1) % HASH_MOD;
        pw[i + 1] = mul_mod(pw[i], base);
    }
    let hash = |a: usize, b: usize| (pre[b] + HASH_MOD - mul_mod(pre[a], pw[b - a])) % HASH_MOD;

    let mut phrases = Vec::new();
    let mut ends: Vec<usize> = Vec::new(); // exclusive 0-based phrase ends
    let mut i = 0;
    while i < n {
        let (bound, _) = longest_previous(text, i, n - i - 1);
        let mut chosen = (0, 0);
        'len: for len in (1..=bound).rev() {
            let target = hash(i, i + len);
            for &e in &ends {
                if e >= len && hash(e - len, e) == target && text[e - len..e] == text[i..i + len] {
                    chosen = (len, e - len + 1);
                    break 'len;
                }
            }
        }
        phrases.push(Phrase {
            copy_start: chosen.1,
            copy_len: chosen.0,
            explicit_char: text[i + chosen.0],
        });
        i += chosen.0 + 1;
        ends.push(i);
    }
    Parsing {
        flavor: Flavor::LzEnd,
        text_len: n,
        phrases,
    }
}
