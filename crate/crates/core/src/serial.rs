//! Little-endian byte encoding shared by every serializable structure.

use crate::error::LoadError;

pub(crate) trait Encode {
    fn encode(&self, out: &mut Vec<u8>);
}

pub(crate) trait Decode: Sized {
    fn decode(r: &mut Reader<'_>) -> Result<Self, LoadError>;
}

pub(crate) fn put_u8(out: &mut Vec<u8>, v: u8) {
    out.push(v);
}

pub(crate) fn put_u16(out: &mut Vec<u8>, v: u16) {
    out.extend_from_slice(&v.to_le_bytes());
}

pub(crate) fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

pub(crate) fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

pub(crate) fn put_len(out: &mut Vec<u8>, v: usize) {
    put_u64(out, v as u64);
}

pub(crate) fn put_bytes(out: &mut Vec<u8>, bytes: &[u8]) {
    put_len(out, bytes.len());
    out.extend_from_slice(bytes);
}

pub(crate) fn put_words(out: &mut Vec<u8>, words: &[u64]) {
    put_len(out, words.len());
    for &w in words {
        put_u64(out, w);
    }
}

pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.pos >= self.buf.len()
    }

    pub(crate) fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8], LoadError> {
        let end = self.pos.checked_add(n).ok_or(LoadError::Truncated(what))?;
        if end > self.buf.len() {
            return Err(LoadError::Truncated(what));
        }
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    pub(crate) fn u8(&mut self, what: &'static str) -> Result<u8, LoadError> {
        Ok(self.take(1, what)?[0])
    }

    pub(crate) fn u16(&mut self, what: &'static str) -> Result<u16, LoadError> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    pub(crate) fn u32(&mut self, what: &'static str) -> Result<u32, LoadError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    pub(crate) fn u64(&mut self, what: &'static str) -> Result<u64, LoadError> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    pub(crate) fn len(&mut self, what: &'static str) -> Result<usize, LoadError> {
        let v = self.u64(what)?;
        usize::try_from(v).map_err(|_| LoadError::Malformed(format!("{what}: length {v}")))
    }

    pub(crate) fn bytes(&mut self, what: &'static str) -> Result<Vec<u8>, LoadError> {
        let n = self.len(what)?;
        Ok(self.take(n, what)?.to_vec())
    }

    pub(crate) fn words(&mut self, what: &'static str) -> Result<Vec<u64>, LoadError> {
        let n = self.len(what)?;
        let raw = self.take(n.checked_mul(8).ok_or(LoadError::Truncated(what))?, what)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

pub(crate) fn malformed(msg: impl Into<String>) -> LoadError {
    LoadError::Malformed(msg.into())
}
