use std::cmp::Ordering;

use crate::error::Result;

use super::{KeyAccess, SearchRange};

/// Orders a string against `key` given only the string's first
/// `min(len, key.len())` bytes: `Equal` when `key` is a prefix of the
/// string, otherwise the plain lexicographic order.
pub fn compare_prefix(head: &[u8], key: &[u8]) -> Ordering {
    match head.iter().zip(key).find(|(a, b)| a != b) {
        Some((a, b)) => a.cmp(b),
        None if head.len() >= key.len() => Ordering::Equal,
        None => Ordering::Less,
    }
}

fn compare_rank(keys: &impl KeyAccess, rank: usize, key: &[u8]) -> Result<Ordering> {
    Ok(compare_prefix(&keys.key_head(rank, key.len())?, key))
}

/// Ranks of the strings having `key` as a prefix, found with two binary
/// searches that compare whole prefixes.
pub fn binsearch_range(keys: &impl KeyAccess, key: &[u8]) -> Result<SearchRange> {
    let m = keys.count();
    // first rank not below the key
    let (mut lo, mut hi) = (1, m + 1);
    // every rank from here on is above the key
    let mut above = m + 1;
    while lo < hi {
        let mid = (lo + hi) / 2;
        match compare_rank(keys, mid, key)? {
            Ordering::Less => lo = mid + 1,
            Ordering::Equal => hi = mid,
            Ordering::Greater => {
                hi = mid;
                above = mid;
            }
        }
    }
    let first = lo;
    // first rank above the key
    let mut hi = above;
    while lo < hi {
        let mid = (lo + hi) / 2;
        if compare_rank(keys, mid, key)? == Ordering::Greater {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    if first >= lo {
        return Ok(SearchRange::empty(true));
    }
    Ok(SearchRange::new(first, lo - 1, true))
}
