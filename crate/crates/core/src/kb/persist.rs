//! Binary index file: `EGKB` magic, little-endian u16 format version, payload,
//! and a SHA-256 trailer over everything before it. Adjacency is rebuilt on
//! load, so only concepts, triples and metadata are stored.

use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::index::{IndexMeta, KbIndex, KbTriple};
use super::KbError;
use crate::graph::SYNTHETIC16;

pub const MAGIC: &[u8; 4] = b"EGKB";
pub const FORMAT_VERSION: u16 = 1;
const HEADER: usize = 6;
const TRAILER: usize = 32;

pub fn encode_index(index: &KbIndex) -> Vec<u8> {
    let mut buf = Vec::with_capacity(16 + index.concept_count() * 16 + index.triple_count() * 9);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    let meta = index.meta();
    put_str(&mut buf, &meta.source_checksum);
    put_str(&mut buf, &meta.merge_map_version);
    buf.extend_from_slice(&meta.build_timestamp.to_le_bytes());
    buf.extend_from_slice(&(index.concept_count() as u32).to_le_bytes());
    for c in index.concepts() {
        put_str(&mut buf, c);
    }
    buf.extend_from_slice(&(index.triple_count() as u32).to_le_bytes());
    for t in index.raw_triples() {
        buf.extend_from_slice(&t.head.to_le_bytes());
        buf.push(t.relation);
        buf.extend_from_slice(&t.tail.to_le_bytes());
    }
    let digest = Sha256::digest(&buf);
    buf.extend_from_slice(&digest);
    buf
}

pub fn decode_index(bytes: &[u8]) -> Result<KbIndex, KbError> {
    if bytes.len() >= MAGIC.len() && &bytes[..MAGIC.len()] != MAGIC {
        return Err(KbError::BadMagic);
    }
    if bytes.len() < HEADER + TRAILER {
        return Err(KbError::ChecksumMismatch);
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FORMAT_VERSION {
        return Err(KbError::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let (body, trailer) = bytes.split_at(bytes.len() - TRAILER);
    if Sha256::digest(body).as_slice() != trailer {
        return Err(KbError::ChecksumMismatch);
    }

    let mut r = Reader {
        buf: &body[HEADER..],
    };
    let meta = IndexMeta {
        source_checksum: r.string()?,
        merge_map_version: r.string()?,
        build_timestamp: r.u64()?,
    };
    let n_concepts = r.u32()? as usize;
    let mut concepts = Vec::with_capacity(n_concepts);
    for _ in 0..n_concepts {
        concepts.push(r.string()?);
    }
    if !concepts.windows(2).all(|w| w[0] < w[1]) {
        return Err(KbError::Corrupt("concept table is not sorted".into()));
    }
    let n_triples = r.u32()? as usize;
    let mut triples = Vec::with_capacity(n_triples);
    for _ in 0..n_triples {
        let t = KbTriple {
            head: r.u32()?,
            relation: r.u8()?,
            tail: r.u32()?,
        };
        if t.head as usize >= n_concepts
            || t.tail as usize >= n_concepts
            || t.relation as usize >= SYNTHETIC16.len()
        {
            return Err(KbError::Corrupt(format!("triple out of range: {t:?}")));
        }
        triples.push(t);
    }
    if !triples.windows(2).all(|w| w[0] < w[1]) {
        return Err(KbError::Corrupt("triple table is not sorted".into()));
    }
    if !r.buf.is_empty() {
        return Err(KbError::Corrupt("trailing bytes after triple table".into()));
    }
    KbIndex::from_parts(concepts, triples, meta)
}

/// Writes through a temporary file in the same directory, then renames.
pub fn save_index(index: &KbIndex, path: &Path) -> Result<(), KbError> {
    let bytes = encode_index(index);
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let io_err = |e: std::io::Error| KbError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(&bytes).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn load_index(path: &Path) -> Result<KbIndex, KbError> {
    let bytes =
        std::fs::read(path).map_err(|e| KbError::Io(format!("{}: {e}", path.display())))?;
    decode_index(&bytes)
}

fn put_str(buf: &mut Vec<u8>, s: &str) {
    buf.extend_from_slice(&(s.len() as u32).to_le_bytes());
    buf.extend_from_slice(s.as_bytes());
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], KbError> {
        if self.buf.len() < n {
            return Err(KbError::Corrupt("unexpected end of payload".into()));
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }

    fn u8(&mut self) -> Result<u8, KbError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, KbError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, KbError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String, KbError> {
        let n = self.u32()? as usize;
        let bytes = self.take(n)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| KbError::Corrupt("invalid UTF-8".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Triple;

    fn fixture() -> KbIndex {
        let ts = [
            Triple::parse("cat", "is_a", "animal").unwrap(),
            Triple::parse("dog", "is_a", "animal").unwrap(),
            Triple::parse("cat", "desires", "food").unwrap(),
        ];
        KbIndex::from_triples(&ts).unwrap()
    }

    #[test]
    fn round_trip() {
        let idx = fixture();
        let back = decode_index(&encode_index(&idx)).unwrap();
        assert_eq!(back, idx);
        assert_eq!(back.content_checksum(), idx.content_checksum());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kb.idx");
        save_index(&fixture(), &path).unwrap();
        assert_eq!(load_index(&path).unwrap(), fixture());
    }

    #[test]
    fn truncation_detected() {
        let bytes = encode_index(&fixture());
        for cut in [bytes.len() - 1, bytes.len() / 2, 7] {
            assert!(matches!(
                decode_index(&bytes[..cut]),
                Err(KbError::ChecksumMismatch)
            ));
        }
    }

    #[test]
    fn bit_flip_detected() {
        let mut bytes = encode_index(&fixture());
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0x40;
        assert!(matches!(decode_index(&bytes), Err(KbError::ChecksumMismatch)));
    }

    #[test]
    fn version_bump_detected() {
        let mut bytes = encode_index(&fixture());
        bytes[4] += 1;
        assert!(matches!(
            decode_index(&bytes),
            Err(KbError::VersionMismatch { found: 2, expected: 1 })
        ));
    }

    #[test]
    fn wrong_magic() {
        let mut bytes = encode_index(&fixture());
        bytes[0] = b'X';
        assert!(matches!(decode_index(&bytes), Err(KbError::BadMagic)));
    }
}
