//! On-disk container: a fixed header, a section table and the sections.
//!
//! ```text
//! "LZSI" | version u16 | flavor u8 | variant u8 | section count u64
//! per section: tag [4] | offset u64 | length u64 | crc32 u32
//! section bodies at the recorded absolute offsets
//! ```
//!
//! All integers are little-endian. Sections with unknown tags are skipped.

use std::io::{Read, Write};

use crate::error::{LoadError, Result};
use crate::parsing::Flavor;
use crate::patricia::PatriciaTree;
use crate::serial::{self, malformed, Decode, Encode, Reader};
use crate::succinct::{IntVec, Permutation, SparseBitmap, WaveletTree};

use super::{IndexConfig, IndexCore, ReverseSide, SuffixSide, Variant};

pub const MAGIC: &[u8; 4] = b"LZSI";
pub const FORMAT_VERSION: u16 = 1;

const HEADER_LEN: usize = 4 + 2 + 1 + 1 + 8;
const ENTRY_LEN: usize = 4 + 8 + 8 + 4;

const META: [u8; 4] = *b"META";
const LCHARS: [u8; 4] = *b"LCHR";
const BBITMAP: [u8; 4] = *b"BMAP";
const SBITMAP: [u8; 4] = *b"SMAP";
const PERM: [u8; 4] = *b"PERM";
const DWT: [u8; 4] = *b"DWT ";
const RWT: [u8; 4] = *b"RWT ";
const SUFSIDE: [u8; 4] = *b"SUFS";
const REVSIDE: [u8; 4] = *b"REVS";

fn encoded(x: &impl Encode) -> Vec<u8> {
    let mut v = Vec::new();
    x.encode(&mut v);
    v
}

fn tag_name(tag: &[u8; 4]) -> String {
    String::from_utf8_lossy(tag).trim_end().to_string()
}

fn assemble(config: IndexConfig, sections: &[([u8; 4], Vec<u8>)]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    serial::put_u16(&mut out, FORMAT_VERSION);
    serial::put_u8(&mut out, config.flavor.code());
    serial::put_u8(&mut out, config.variant.number());
    serial::put_len(&mut out, sections.len());
    let mut offset = HEADER_LEN + ENTRY_LEN * sections.len();
    for (tag, body) in sections {
        out.extend_from_slice(tag);
        serial::put_len(&mut out, offset);
        serial::put_len(&mut out, body.len());
        serial::put_u32(&mut out, crc32fast::hash(body));
        offset += body.len();
    }
    for (_, body) in sections {
        out.extend_from_slice(body);
    }
    out
}

impl IndexCore {
    pub(crate) fn sections(&self) -> Vec<([u8; 4], Vec<u8>)> {
        let mut meta = Vec::new();
        for v in [self.n, self.n_prime, self.sigma, self.h, self.delta] {
            serial::put_len(&mut meta, v);
        }
        serial::put_u64(&mut meta, self.avg_c.to_bits());
        serial::put_len(&mut meta, self.config.sample_rate);
        serial::put_len(&mut meta, self.config.perm_period.unwrap_or(0));
        serial::put_u32(&mut meta, self.config.dac_width);

        let mut lchars = Vec::new();
        serial::put_bytes(&mut lchars, &self.lchars);

        let mut suf = Vec::new();
        match &self.suffix_side {
            SuffixSide::Trie(t) => {
                serial::put_u8(&mut suf, 0);
                t.encode(&mut suf);
            }
            SuffixSide::Ids(ids) => {
                serial::put_u8(&mut suf, 1);
                ids.encode(&mut suf);
            }
            SuffixSide::Implicit => serial::put_u8(&mut suf, 2),
        }
        let mut rev = Vec::new();
        serial::put_len(&mut rev, self.last_rev_rank);
        match &self.reverse_side {
            ReverseSide::Trie(t) => {
                serial::put_u8(&mut rev, 0);
                t.encode(&mut rev);
            }
            ReverseSide::Ids(ids) => {
                serial::put_u8(&mut rev, 1);
                ids.encode(&mut rev);
            }
        }

        vec![
            (META, meta),
            (LCHARS, lchars),
            (BBITMAP, encoded(&self.b)),
            (SBITMAP, encoded(&self.s)),
            (PERM, encoded(&self.p)),
            (DWT, encoded(&self.dwt)),
            (RWT, encoded(&self.rwt)),
            (SUFSIDE, suf),
            (REVSIDE, rev),
        ]
    }

    pub fn serialize(&self) -> Vec<u8> {
        assemble(self.config, &self.sections())
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(&self.serialize())?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        Ok(Self::deserialize(&buf)?)
    }

    pub fn deserialize(bytes: &[u8]) -> std::result::Result<Self, LoadError> {
        let mut r = Reader::new(bytes);
        if r.take(4, "magic")? != MAGIC {
            return Err(LoadError::BadMagic);
        }
        let version = r.u16("version")?;
        if version != FORMAT_VERSION {
            return Err(LoadError::UnsupportedVersion(version));
        }
        let flavor_code = r.u8("flavor")?;
        let flavor = Flavor::from_code(flavor_code).ok_or_else(|| malformed(format!("flavor code {flavor_code}")))?;
        let variant_code = r.u8("variant")?;
        let variant =
            Variant::from_number(variant_code).ok_or_else(|| malformed(format!("variant {variant_code}")))?;
        let count = r.len("section count")?;
        let mut table: Vec<([u8; 4], &[u8])> = Vec::new();
        for _ in 0..count {
            let tag: [u8; 4] = r.take(4, "section table")?.try_into().unwrap();
            let offset = r.len("section table")?;
            let len = r.len("section table")?;
            let crc = r.u32("section table")?;
            let end = offset.checked_add(len).ok_or(LoadError::Truncated("section body"))?;
            if end > bytes.len() {
                return Err(LoadError::Truncated("section body"));
            }
            let body = &bytes[offset..end];
            if crc32fast::hash(body) != crc {
                return Err(LoadError::ChecksumMismatch(tag_name(&tag)));
            }
            table.push((tag, body));
        }
        let section = |tag: [u8; 4]| -> std::result::Result<Reader, LoadError> {
            table
                .iter()
                .find(|(t, _)| *t == tag)
                .map(|(_, body)| Reader::new(body))
                .ok_or_else(|| LoadError::MissingSection(tag_name(&tag)))
        };
        let finish = |r: Reader, tag: [u8; 4]| {
            if r.is_empty() {
                Ok(())
            } else {
                Err(malformed(format!("trailing bytes in section {}", tag_name(&tag))))
            }
        };
        fn whole<T: Decode>(mut r: Reader, tag: [u8; 4]) -> std::result::Result<T, LoadError> {
            let v = T::decode(&mut r)?;
            if !r.is_empty() {
                return Err(malformed(format!("trailing bytes in section {}", tag_name(&tag))));
            }
            Ok(v)
        }

        let mut m = section(META)?;
        let n = m.len("n")?;
        let n_prime = m.len("n'")?;
        let sigma = m.len("sigma")?;
        let h = m.len("height")?;
        let delta = m.len("delta")?;
        let avg_c = f64::from_bits(m.u64("average copies")?);
        let sample_rate = m.len("sample rate")?;
        let perm_period = m.len("permutation period")?;
        let dac_width = m.u32("dac width")?;
        finish(m, META)?;

        let mut l = section(LCHARS)?;
        let lchars = l.bytes("last characters")?;
        finish(l, LCHARS)?;

        let b: SparseBitmap = whole(section(BBITMAP)?, BBITMAP)?;
        let s: SparseBitmap = whole(section(SBITMAP)?, SBITMAP)?;
        let p: Permutation = whole(section(PERM)?, PERM)?;
        let dwt: WaveletTree = whole(section(DWT)?, DWT)?;
        let rwt: WaveletTree = whole(section(RWT)?, RWT)?;

        let mut sr = section(SUFSIDE)?;
        let suffix_side = match sr.u8("suffix side kind")? {
            0 => SuffixSide::Trie(Box::new(PatriciaTree::decode(&mut sr)?)),
            1 => SuffixSide::Ids(IntVec::decode(&mut sr)?),
            2 => SuffixSide::Implicit,
            k => return Err(malformed(format!("suffix side kind {k}"))),
        };
        finish(sr, SUFSIDE)?;
        let mut rr = section(REVSIDE)?;
        let last_rev_rank = rr.len("last reverse rank")?;
        let reverse_side = match rr.u8("reverse side kind")? {
            0 => ReverseSide::Trie(Box::new(PatriciaTree::decode(&mut rr)?)),
            1 => ReverseSide::Ids(IntVec::decode(&mut rr)?),
            k => return Err(malformed(format!("reverse side kind {k}"))),
        };
        finish(rr, REVSIDE)?;

        let sides_match = match (&suffix_side, variant) {
            (SuffixSide::Trie(t), v) => v.suffix_trie() && t.leaf_count() == n_prime,
            (SuffixSide::Ids(ids), Variant::IdsRevTrie | Variant::BothIds) => ids.len() == n_prime,
            (SuffixSide::Implicit, Variant::ImplicitIds) => true,
            _ => false,
        } && match (&reverse_side, variant) {
            (ReverseSide::Trie(t), v) => v.reverse_trie() && t.leaf_count() == n_prime && t.has_payload(),
            (ReverseSide::Ids(ids), v) => !v.reverse_trie() && ids.len() == n_prime,
        };
        if !sides_match {
            return Err(malformed("search sides do not match the variant"));
        }
        if n == 0
            || n_prime == 0
            || lchars.len() != n_prime
            || b.len() != n
            || b.count_ones() != n_prime
            || s.len() != n + n_prime + 1
            || s.count_ones() != n_prime
            || p.len() != n_prime
            || dwt.len() != n_prime
            || rwt.len() != n_prime
            || rwt.max_symbol() > n_prime as u64
            || last_rev_rank == 0
            || last_rev_rank > n_prime
            || b.select1(n_prime).ok() != Some(n)
        {
            return Err(malformed("component sizes disagree"));
        }

        let config = IndexConfig {
            flavor,
            variant,
            sample_rate,
            perm_period: Some(perm_period),
            dac_width,
        };
        config.validate().map_err(|e| malformed(e.to_string()))?;
        Ok(IndexCore {
            config,
            n,
            n_prime,
            sigma,
            h,
            delta,
            avg_c,
            lchars,
            b,
            s,
            p,
            dwt,
            rwt,
            suffix_side,
            reverse_side,
            last_rev_rank,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::tests::e_index;

    #[test]
    fn round_trip_all_variants() {
        for v in Variant::ALL {
            let idx = e_index(v);
            let bytes = idx.serialize();
            let back = IndexCore::deserialize(&bytes).unwrap();
            assert_eq!(back, idx);
            assert_eq!(back.serialize(), bytes);
            assert_eq!(back.locate(b"la").unwrap().positions, vec![2, 10, 14]);
        }
    }

    #[test]
    fn load_errors_are_distinct() {
        let bytes = e_index(Variant::ImplicitIds).serialize();

        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert_eq!(IndexCore::deserialize(&bad).unwrap_err(), LoadError::BadMagic);
        assert_eq!(LoadError::BadMagic.to_string(), "bad magic");

        let mut bad = bytes.clone();
        bad[4] += 1;
        let e = IndexCore::deserialize(&bad).unwrap_err();
        assert_eq!(e, LoadError::UnsupportedVersion(FORMAT_VERSION + 1));
        assert!(e.to_string().starts_with("unsupported version"));

        let cut = &bytes[..bytes.len() / 2];
        assert!(matches!(IndexCore::deserialize(cut).unwrap_err(), LoadError::Truncated(_)));
        assert!(matches!(IndexCore::deserialize(&bytes[..3]).unwrap_err(), LoadError::Truncated(_)));

        let mut bad = bytes.clone();
        let last = bad.len() - 1;
        bad[last] ^= 0x40;
        assert_eq!(
            IndexCore::deserialize(&bad).unwrap_err(),
            LoadError::ChecksumMismatch("REVS".into())
        );
    }

    #[test]
    fn unknown_sections_are_ignored_and_missing_ones_reported() {
        let idx = e_index(Variant::BothIds);
        let mut sections = idx.sections();
        sections.push((*b"XTRA", vec![1, 2, 3]));
        let rebuilt = assemble(idx.config, &sections);
        assert_eq!(IndexCore::deserialize(&rebuilt).unwrap(), idx);

        sections.retain(|(t, _)| t != b"PERM");
        let rebuilt = assemble(idx.config, &sections);
        assert_eq!(
            IndexCore::deserialize(&rebuilt).unwrap_err(),
            LoadError::MissingSection("PERM".into())
        );
    }
}
