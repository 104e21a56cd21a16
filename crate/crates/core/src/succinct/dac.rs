use crate::error::{Error, LoadError, Result};
use crate::serial::{self, Decode, Encode, Reader};

use super::bits::{bit_len, IntVec};
use super::plain::PlainBitmap;

/// Directly addressable codes: each value is split into `b`-bit chunks,
/// least significant first. Level `t` holds the t-th chunk of every value
/// that has one, and a bitmap marking which of those values continue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dac {
    width: u32,
    len: usize,
    chunks: Vec<IntVec>,
    more: Vec<PlainBitmap>,
}

impl Dac {
    pub fn new(values: &[u64], width: u32) -> Result<Self> {
        if width == 0 || width > 64 {
            return Err(Error::invalid(format!("chunk width {width} outside [1, 64]")));
        }
        let mut chunks = Vec::new();
        let mut more = Vec::new();
        let mut cur: Vec<u64> = values.to_vec();
        while !cur.is_empty() {
            let mut level = IntVec::new(width);
            let mut flags = Vec::with_capacity(cur.len());
            let mut next = Vec::new();
            for &v in &cur {
                let chunk = if width == 64 { v } else { v & ((1u64 << width) - 1) };
                level.push(chunk);
                let rest = v.checked_shr(width).unwrap_or(0);
                flags.push(rest > 0);
                if rest > 0 {
                    next.push(rest);
                }
            }
            chunks.push(level);
            more.push(PlainBitmap::from_bools(flags));
            cur = next;
        }
        Ok(Dac {
            width,
            len: values.len(),
            chunks,
            more,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn levels(&self) -> usize {
        self.chunks.len()
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Value at 0-based index `i`.
    pub fn get(&self, i: usize) -> Result<u64> {
        if i >= self.len {
            return Err(Error::range("dac index", i, 0, self.len.saturating_sub(1)));
        }
        let mut v = 0u64;
        let mut shift = 0u32;
        let mut idx = i;
        for (level, flags) in self.chunks.iter().zip(&self.more) {
            v |= level.get(idx) << shift;
            if !flags.get(idx + 1) {
                break;
            }
            idx = flags.rank1(idx + 1) - 1;
            shift += self.width;
        }
        Ok(v)
    }

    /// Widest stored value, in bits.
    pub fn max_bits(&self) -> u32 {
        (0..self.len).map(|i| bit_len(self.get(i).unwrap())).max().unwrap_or(0)
    }
}

impl Encode for Dac {
    fn encode(&self, out: &mut Vec<u8>) {
        serial::put_u8(out, self.width as u8);
        serial::put_len(out, self.len);
        serial::put_len(out, self.chunks.len());
        for (c, m) in self.chunks.iter().zip(&self.more) {
            c.encode(out);
            m.encode(out);
        }
    }
}

impl Decode for Dac {
    fn decode(r: &mut Reader<'_>) -> Result<Self, LoadError> {
        let width = r.u8("dac width")? as u32;
        let len = r.len("dac length")?;
        let nlevels = r.len("dac levels")?;
        if width == 0 || width > 64 || nlevels > 64 {
            return Err(serial::malformed("dac header"));
        }
        let mut chunks = Vec::with_capacity(nlevels);
        let mut more = Vec::with_capacity(nlevels);
        let mut expect = len;
        for _ in 0..nlevels {
            let c = IntVec::decode(r)?;
            let m = PlainBitmap::decode(r)?;
            if c.len() != expect || m.len() != expect || c.width() != width {
                return Err(serial::malformed("dac level size"));
            }
            expect = m.count_ones();
            chunks.push(c);
            more.push(m);
        }
        if expect != 0 || (len > 0 && nlevels == 0) {
            return Err(serial::malformed("dac continuation"));
        }
        Ok(Dac {
            width,
            len,
            chunks,
            more,
        })
    }
}
