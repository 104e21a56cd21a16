use std::fmt;

use super::lz77::PrefixMatcher;
use super::lzend::EndMatcher;
use super::{Flavor, Parsing};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    /// Phrase lengths do not add up to the text length.
    LengthMismatch { parsed: usize, text: usize },
    /// Empty copy with a nonzero start, or a source outside the prefix
    /// preceding the phrase.
    SourceOutOfBounds,
    /// The phrase does not spell the text at its position.
    Reconstruction { position: usize },
    /// A longer copy of this length was available.
    NotMaximal { longer: usize },
    /// LZ-End source that does not end where an earlier phrase ends.
    SourceNotAtPhraseEnd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// 1-based phrase number; 0 for whole-parsing violations.
    pub phrase: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "phrase {}: {:?}", self.phrase, self.kind)
    }
}

/// Checks a parsing against its text and returns the first violation.
///
/// Checked per phrase, in order: source containment, reconstruction, for
/// LZ-End that the source ends at an earlier phrase end, and greedy
/// maximality. A phrase whose copy already reaches the byte before the end
/// of the text is exempt from maximality.
pub fn validate_parsing(p: &Parsing, text: &[u8]) -> Result<(), Violation> {
    let n = text.len();
    let total: usize = p.phrases.iter().map(|x| x.len()).sum();
    if total != n || p.text_len != n {
        return Err(Violation {
            phrase: 0,
            kind: ViolationKind::LengthMismatch { parsed: total, text: n },
        });
    }
    if n == 0 {
        return Ok(());
    }

    let prefix = PrefixMatcher::new(text);
    let reversed: Vec<u8> = text.iter().rev().copied().collect();
    let mut ends = (p.flavor == Flavor::LzEnd).then(|| EndMatcher::new(&reversed));
    let mut end_set = vec![false; n + 1];

    let mut i = 0; // 0-based phrase start
    for (k, ph) in p.phrases.iter().enumerate() {
        let fail = |kind| Err(Violation { phrase: k + 1, kind });
        let len = ph.copy_len;
        if len == 0 && ph.copy_start != 0 {
            return fail(ViolationKind::SourceOutOfBounds);
        }
        if len > 0 && (ph.copy_start == 0 || ph.copy_start - 1 + len > i) {
            return fail(ViolationKind::SourceOutOfBounds);
        }
        if len > 0 {
            let src = &text[ph.copy_start - 1..ph.copy_start - 1 + len];
            if let Some(off) = src.iter().zip(&text[i..i + len]).position(|(a, b)| a != b) {
                return fail(ViolationKind::Reconstruction { position: i + off + 1 });
            }
        }
        if text[i + len] != ph.explicit_char {
            return fail(ViolationKind::Reconstruction { position: i + len + 1 });
        }
        if p.flavor == Flavor::LzEnd && len > 0 && !end_set[ph.copy_start - 1 + len] {
            return fail(ViolationKind::SourceNotAtPhraseEnd);
        }

        let limit = n - i - 1;
        if len < limit {
            match &ends {
                None => {
                    if prefix.leftmost_previous(i, len + 1).is_some() {
                        return fail(ViolationKind::NotMaximal { longer: len + 1 });
                    }
                }
                Some(m) => {
                    let (bound, _) = prefix.longest_previous(i, limit);
                    if let Some(l) = (len + 1..=bound).rev().find(|&l| m.has_end(i, l)) {
                        return fail(ViolationKind::NotMaximal { longer: l });
                    }
                }
            }
        }

        i += len + 1;
        end_set[i] = true;
        if let Some(m) = &mut ends {
            m.mark_end(i - 1);
        }
    }
    Ok(())
}
