//! LZ77 and LZ-End parsings of a byte string, their validation, and the
//! structural statistics used by the index (height and source depths).
//!
//! A phrase is a copied part (possibly empty) followed by one explicit
//! byte. Copies never overlap their phrase: the source lies entirely in
//! the text before the phrase starts. All positions are 1-based.

mod lz77;
mod lzend;
mod stats;
mod validate;

pub use lz77::parse_lz77;
pub use lzend::parse_lzend;
pub use stats::{compute_height, compute_source_depths, DepthAssignment, HeightReport};
pub use validate::{validate_parsing, Violation, ViolationKind};

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    Lz77,
    LzEnd,
}

impl Flavor {
    pub const ALL: [Flavor; 2] = [Flavor::Lz77, Flavor::LzEnd];

    pub fn code(self) -> u8 {
        match self {
            Flavor::Lz77 => 0,
            Flavor::LzEnd => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Flavor::Lz77),
            1 => Some(Flavor::LzEnd),
            _ => None,
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Lz77 => "lz77",
            Flavor::LzEnd => "lzend",
        })
    }
}

impl FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "lz77" => Ok(Flavor::Lz77),
            "lzend" | "lz-end" => Ok(Flavor::LzEnd),
            other => Err(Error::invalid(format!("unknown flavor {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phrase {
    /// 1-based start of the source, or 0 when the source is empty.
    pub copy_start: usize,
    pub copy_len: usize,
    pub explicit_char: u8,
}

impl Phrase {
    pub fn literal(c: u8) -> Self {
        Phrase {
            copy_start: 0,
            copy_len: 0,
            explicit_char: c,
        }
    }

    pub fn len(&self) -> usize {
        self.copy_len + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// 1-based inclusive source range, if the source is nonempty.
    pub fn source(&self) -> Option<(usize, usize)> {
        (self.copy_len > 0).then(|| (self.copy_start, self.copy_start + self.copy_len - 1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsing {
    pub flavor: Flavor,
    pub text_len: usize,
    pub phrases: Vec<Phrase>,
}

impl Parsing {
    /// Number of phrases, n'.
    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    /// 1-based end position of every phrase.
    pub fn phrase_ends(&self) -> Vec<usize> {
        let mut end = 0;
        self.phrases
            .iter()
            .map(|p| {
                end += p.len();
                end
            })
            .collect()
    }

    /// 1-based start position of every phrase.
    pub fn phrase_starts(&self) -> Vec<usize> {
        let mut start = 1;
        self.phrases
            .iter()
            .map(|p| {
                let s = start;
                start += p.len();
                s
            })
            .collect()
    }

    /// Rebuilds the text by replaying the copies. Returns `None` when a
    /// source reaches outside the already decoded prefix.
    pub fn decode(&self) -> Option<Vec<u8>> {
        let mut out = Vec::with_capacity(self.text_len);
        for p in &self.phrases {
            if let Some((a, b)) = p.source() {
                if a == 0 || b > out.len() {
                    return None;
                }
                out.extend_from_within(a - 1..b);
            }
            out.push(p.explicit_char);
        }
        Some(out)
    }

    /// Phrase indices (0-based) in source order: empty sources first, then
    /// by source start, shorter sources first, ties by phrase number.
    pub fn source_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.phrases.len()).collect();
        order.sort_by_key(|&k| {
            let p = &self.phrases[k];
            let start = if p.copy_len == 0 { 0 } else { p.copy_start };
            (start, p.copy_len, k)
        });
        order
    }

    /// Human-readable dump, one phrase per line.
    pub fn dump(&self, text: &[u8]) -> String {
        let mut s = format!("flavor {} n {} phrases {}\n", self.flavor, self.text_len, self.len());
        for ((k, p), start) in self.phrases.iter().enumerate().zip(self.phrase_starts()) {
            let body = &text[start - 1..start - 1 + p.len()];
            s.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                k + 1,
                start,
                p.copy_start,
                p.copy_len,
                escape(body)
            ));
        }
        s
    }
}

fn escape(bytes: &[u8]) -> String {
    bytes.iter().flat_map(|&b| std::ascii::escape_default(b)).map(char::from).collect()
}

/// Parses `text` with the requested flavor.
pub fn parse(text: &[u8], flavor: Flavor) -> Parsing {
    match flavor {
        Flavor::Lz77 => parse_lz77(text),
        Flavor::LzEnd => parse_lzend(text),
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const E: &[u8] = b"alabar_a_la_alabarda$";

    #[test]
    fn decode_and_boundaries() {
        let p = parse_lz77(E);
        assert_eq!(p.decode().unwrap(), E);
        assert_eq!(p.phrase_ends(), vec![1, 2, 4, 6, 7, 9, 12, 19, 21]);
        assert_eq!(p.phrase_starts(), vec![1, 2, 3, 5, 7, 8, 10, 13, 20]);
    }

    #[test]
    fn source_order_of_example() {
        let p = parse_lz77(E);
        let order: Vec<usize> = p.source_order().iter().map(|k| k + 1).collect();
        assert_eq!(order, vec![1, 2, 5, 3, 4, 6, 9, 8, 7]);
    }

    #[test]
    fn flavor_names() {
        assert_eq!("lz77".parse::<Flavor>().unwrap(), Flavor::Lz77);
        assert_eq!("LZEND".parse::<Flavor>().unwrap(), Flavor::LzEnd);
        assert!("lz78".parse::<Flavor>().is_err());
        assert_eq!(Flavor::from_code(Flavor::LzEnd.code()), Some(Flavor::LzEnd));
    }
}
