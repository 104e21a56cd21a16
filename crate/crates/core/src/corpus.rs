//! Synthetic texts and query workloads.

use rand::seq::SliceRandom;
use rand::Rng;

/// Alphabet sizes used by the randomized suites.
pub const ALPHABET_SIZES: [usize; 4] = [2, 4, 26, 256];

/// `sigma` symbols: lowercase letters up to 26, raw bytes above that.
pub fn alphabet(sigma: usize) -> Vec<u8> {
    assert!((1..=256).contains(&sigma), "alphabet size {sigma}");
    if sigma <= 26 {
        (b'a'..).take(sigma).collect()
    } else {
        (0..sigma).map(|b| b as u8).collect()
    }
}

pub fn random_text(rng: &mut impl Rng, symbols: &[u8], len: usize) -> Vec<u8> {
    (0..len).map(|_| *symbols.choose(rng).unwrap()).collect()
}

/// Replaces each byte with probability `rate` by a different symbol.
pub fn mutate(rng: &mut impl Rng, text: &mut [u8], symbols: &[u8], rate: f64) {
    if symbols.len() < 2 {
        return;
    }
    for c in text.iter_mut() {
        if rng.gen_bool(rate) {
            let mut d = *c;
            while d == *c {
                d = *symbols.choose(rng).unwrap();
            }
            *c = d;
        }
    }
}

/// `copies` versions of a random seed concatenated, each one a mutated
/// copy of the version before it.
pub fn repetitive_text(rng: &mut impl Rng, symbols: &[u8], seed_len: usize, copies: usize, rate: f64) -> Vec<u8> {
    let mut version = random_text(rng, symbols, seed_len);
    let mut out = Vec::with_capacity(seed_len * copies);
    for k in 0..copies {
        if k > 0 {
            mutate(rng, &mut version, symbols, rate);
        }
        out.extend_from_slice(&version);
    }
    out
}

/// A random substring of length `m`; `text.len() >= m >= 1`.
pub fn sample_substring(rng: &mut impl Rng, text: &[u8], m: usize) -> Vec<u8> {
    let start = rng.gen_range(0..=text.len() - m);
    text[start..start + m].to_vec()
}

/// A random 1-based range `[s, e]` of at most `max_len` positions.
pub fn random_range(rng: &mut impl Rng, n: usize, max_len: usize) -> (usize, usize) {
    let len = rng.gen_range(1..=max_len.min(n));
    let s = rng.gen_range(1..=n - len + 1);
    (s, s + len - 1)
}

/// Patterns of length `1..=max_len`, alternating between substrings of
/// `text` and random strings over the symbols occurring in it.
pub fn sample_patterns(rng: &mut impl Rng, text: &[u8], count: usize, max_len: usize) -> Vec<Vec<u8>> {
    let mut seen = [false; 256];
    for &c in text {
        seen[c as usize] = true;
    }
    let symbols: Vec<u8> = (0..=255u8).filter(|&c| seen[c as usize]).collect();
    (0..count)
        .map(|k| {
            let m = rng.gen_range(1..=max_len);
            if k % 2 == 0 && m <= text.len() {
                sample_substring(rng, text, m)
            } else {
                random_text(rng, &symbols, m)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn repetitive_text_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = repetitive_text(&mut rng, &alphabet(4), 100, 5, 0.0);
        assert_eq!(t.len(), 500);
        assert!(t.chunks(100).all(|c| c == &t[..100]));
        let t = repetitive_text(&mut rng, &alphabet(4), 1000, 2, 0.05);
        let diff = t[..1000].iter().zip(&t[1000..]).filter(|(a, b)| a != b).count();
        assert!(diff > 10 && diff < 120, "{diff} mutations");
    }

    #[test]
    fn patterns_and_ranges_fit() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = b"abcabcabd";
        for p in sample_patterns(&mut rng, t, 50, 20) {
            assert!((1..=20).contains(&p.len()));
            assert!(p.iter().all(|c| b"abcd".contains(c)));
        }
        for _ in 0..100 {
            let (s, e) = random_range(&mut rng, 9, 4);
            assert!(1 <= s && s <= e && e <= 9 && e - s < 4);
        }
        assert_eq!(alphabet(256).len(), 256);
        assert_eq!(alphabet(2), b"ab");
    }
}
