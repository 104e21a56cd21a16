use crate::error::{Error, LoadError, Result};
use crate::serial::{self, Decode, Encode, Reader};

use super::bits::{ceil_log2, BitBuf, IntVec};
use super::plain::PlainBitmap;

/// Permutation of `[1, n]` with O(1) `apply` and O(l) `inverse`.
///
/// Along each cycle longer than `l`, every l-th element is flagged and
/// stores a back-pointer to the element l steps earlier in the cycle.
/// `inverse(j)` walks forward from `j` until it reaches the predecessor of
/// `j` or a flagged element; from a flagged element it jumps back once and
/// finishes the walk. At most `2l` forward steps are taken.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    forward: IntVec,
    flags: PlainBitmap,
    back: IntVec,
    period: usize,
}

/// Shortcut period used by the index: ⌈log2 n⌉, at least 1.
pub fn default_period(n: usize) -> usize {
    (ceil_log2(n as u64) as usize).max(1)
}

impl Permutation {
    /// Builds from 1-based values; `forward[i - 1]` is the image of `i`.
    pub fn new(forward: &[usize], period: usize) -> Result<Self> {
        if period == 0 {
            return Err(Error::invalid("shortcut period must be at least 1"));
        }
        let n = forward.len();
        let mut seen = vec![false; n];
        for &v in forward {
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::invalid(format!("not a permutation of [1, {n}]: value {v}")));
            }
            seen[v - 1] = true;
        }

        // 0-based working copies
        let fwd: Vec<usize> = forward.iter().map(|&v| v - 1).collect();
        let mut flag_bits = BitBuf::zeros(n);
        let mut back_of = vec![usize::MAX; n];
        let mut visited = vec![false; n];
        let mut cycle = Vec::new();
        for start in 0..n {
            if visited[start] {
                continue;
            }
            cycle.clear();
            let mut x = start;
            while !visited[x] {
                visited[x] = true;
                cycle.push(x);
                x = fwd[x];
            }
            let len = cycle.len();
            if len <= period {
                continue;
            }
            for idx in (0..len).step_by(period) {
                let x = cycle[idx];
                flag_bits.set(x, true);
                back_of[x] = cycle[(idx + len - period) % len];
            }
        }
        let flags = PlainBitmap::new(flag_bits);
        let back_vals: Vec<usize> = (0..n).filter(|&x| back_of[x] != usize::MAX).map(|x| back_of[x] + 1).collect();
        Ok(Permutation {
            forward: IntVec::from_usizes(forward),
            flags,
            back: IntVec::from_usizes(&back_vals),
            period,
        })
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn period(&self) -> usize {
        self.period
    }

    fn check(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.len() {
            return Err(Error::range("permutation index", i, 1, self.len()));
        }
        Ok(())
    }

    #[inline]
    fn fwd(&self, i: usize) -> usize {
        self.forward.get(i - 1) as usize
    }

    pub fn apply(&self, i: usize) -> Result<usize> {
        self.check(i)?;
        Ok(self.fwd(i))
    }

    /// The `i` with `apply(i) == j`.
    pub fn inverse(&self, j: usize) -> Result<usize> {
        self.check(j)?;
        let mut x = j;
        let mut jumped = false;
        loop {
            let next = self.fwd(x);
            if next == j {
                return Ok(x);
            }
            if !jumped && self.flags.get(x) {
                x = self.back.get(self.flags.rank1(x) - 1) as usize;
                jumped = true;
            } else {
                x = next;
            }
        }
    }

    pub fn shortcut_count(&self) -> usize {
        self.back.len()
    }

    pub fn is_shortcut(&self, i: usize) -> bool {
        self.flags.get(i)
    }
}

impl Encode for Permutation {
    fn encode(&self, out: &mut Vec<u8>) {
        serial::put_len(out, self.period);
        self.forward.encode(out);
        self.flags.encode(out);
        self.back.encode(out);
    }
}

impl Decode for Permutation {
    fn decode(r: &mut Reader<'_>) -> Result<Self, LoadError> {
        let period = r.len("permutation period")?;
        let forward = IntVec::decode(r)?;
        let flags = PlainBitmap::decode(r)?;
        let back = IntVec::decode(r)?;
        if period == 0 || flags.len() != forward.len() || back.len() != flags.count_ones() {
            return Err(serial::malformed("permutation layout"));
        }
        // shortcuts pointing into another cycle would make inverse() spin,
        // so they are rebuilt and compared
        let values: Vec<usize> = forward.iter().map(|v| v as usize).collect();
        let rebuilt = Permutation::new(&values, period).map_err(|e| serial::malformed(e.to_string()))?;
        if rebuilt.flags != flags || rebuilt.back != back {
            return Err(serial::malformed("permutation shortcuts"));
        }
        Ok(rebuilt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_source_permutation() {
        let p = Permutation::new(&[1, 2, 4, 5, 3, 6, 9, 8, 7], default_period(9)).unwrap();
        assert_eq!(p.inverse(9).unwrap(), 7);
        assert_eq!(p.apply(7).unwrap(), 9);
    }

    #[test]
    fn identity_and_single_cycle() {
        let id = Permutation::new(&[1, 2, 3, 4, 5], 2).unwrap();
        assert_eq!(id.inverse(3).unwrap(), 3);
        assert_eq!(id.shortcut_count(), 0);

        let n = 50;
        let cyc: Vec<usize> = (1..=n).map(|i| i % n + 1).collect();
        let p = Permutation::new(&cyc, 1).unwrap();
        assert_eq!(p.inverse(1).unwrap(), n);
        for l in [1, 2, 4, 7] {
            let p = Permutation::new(&cyc, l).unwrap();
            for j in 1..=n {
                assert_eq!(p.apply(p.inverse(j).unwrap()).unwrap(), j);
            }
        }
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(&[1, 1], 1).is_err());
        assert!(Permutation::new(&[0, 1], 1).is_err());
        assert!(Permutation::new(&[1, 3], 1).is_err());
        assert!(Permutation::new(&[1], 0).is_err());
        let p = Permutation::new(&[2, 1], 1).unwrap();
        assert!(p.inverse(3).is_err());
        assert!(p.apply(0).is_err());
    }
}
