use crate::error::{Error, Result};

use super::IndexCore;

/// Work done by one extraction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExtractTrace {
    /// Deepest chain of nested copies followed, counting the requested
    /// range as depth 1.
    pub max_depth: usize,
    /// Phrase visits, one per (range, phrase) pair touched.
    pub steps: usize,
}

impl IndexCore {
    /// Text positions `s..=e` (1-based).
    pub fn extract(&self, s: usize, e: usize) -> Result<Vec<u8>> {
        Ok(self.extract_traced(s, e)?.0)
    }

    /// Like [`IndexCore::extract`], also reporting the work done.
    ///
    /// Every phrase overlapping a range contributes its last byte from `L`
    /// when that byte is inside the range, and its copied part becomes a
    /// new range over the source. Ranges are kept on an explicit stack.
    pub fn extract_traced(&self, s: usize, e: usize) -> Result<(Vec<u8>, ExtractTrace)> {
        if s == 0 || e > self.n || s > e {
            return Err(Error::OutOfRange {
                what: "extract range",
                index: if s == 0 || s > e { s } else { e },
                lo: 1,
                hi: self.n,
            });
        }
        let mut out = vec![0u8; e - s + 1];
        let mut trace = ExtractTrace::default();
        // (first, last, offset into out, depth)
        let mut tasks = vec![(s, e, 0usize, 1usize)];
        while let Some((a, b, off, depth)) = tasks.pop() {
            trace.max_depth = trace.max_depth.max(depth);
            let (before, prev_end) = self.b.rank1_last(a - 1)?;
            let first = before + 1;
            let mut start = prev_end + 1;
            for (k, end) in (first..).zip(self.b.ones_from(first)?) {
                trace.steps += 1;
                let lo = a.max(start);
                let hi = b.min(end);
                if hi == end {
                    out[off + end - a] = self.lchars[k - 1];
                }
                let copy_hi = hi.min(end - 1);
                if lo <= copy_hi {
                    let t = self.source_start(k)?;
                    let src = t + (lo - start);
                    tasks.push((src, src + copy_hi - lo, off + lo - a, depth + 1));
                }
                if end >= b {
                    break;
                }
                start = end + 1;
            }
        }
        Ok((out, trace))
    }
}
