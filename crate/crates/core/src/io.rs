//! File helpers shared by the pipeline stages: line-oriented text input,
//! atomic output, and the binary token formats.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::bpe::TokenId;
use crate::{Error, Result};

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Reads a one-item-per-line UTF-8 file. A trailing newline does not
/// produce an extra empty line; `\r\n` endings are accepted.
pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = read_to_string(path)?;
    Ok(text
        .lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l).to_string())
        .collect())
}

/// Writes `contents` to a temporary file next to `path` and renames it into
/// place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    with_atomic_writer(path, |w| w.write_all(contents))
}

pub fn with_atomic_writer<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        write(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Pre-tokenized shard layout (all integers little-endian):
///
/// ```text
/// magic    b"MTSH"
/// version  u32 = 1
/// then per document: len u32, followed by len token ids as u32
/// ```
pub const SHARD_MAGIC: &[u8; 4] = b"MTSH";
pub const SHARD_VERSION: u32 = 1;

pub fn encode_token_shard(docs: &[Vec<TokenId>]) -> Vec<u8> {
    let total: usize = docs.iter().map(|d| 4 + 4 * d.len()).sum();
    let mut out = Vec::with_capacity(8 + total);
    out.extend_from_slice(SHARD_MAGIC);
    out.extend_from_slice(&SHARD_VERSION.to_le_bytes());
    for doc in docs {
        out.extend_from_slice(&(doc.len() as u32).to_le_bytes());
        for id in doc {
            out.extend_from_slice(&id.to_le_bytes());
        }
    }
    out
}

pub fn decode_token_shard(bytes: &[u8], path: &Path) -> Result<Vec<Vec<TokenId>>> {
    let bad = |message: String| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        message,
    };
    if bytes.len() < 8 || &bytes[..4] != SHARD_MAGIC {
        return Err(bad("not a token shard (bad magic)".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != SHARD_VERSION {
        return Err(bad(format!("unsupported shard version {version}")));
    }
    let mut docs = Vec::new();
    let mut rest = &bytes[8..];
    while !rest.is_empty() {
        if rest.len() < 4 {
            return Err(bad(format!("truncated length prefix for document {}", docs.len())));
        }
        let n = u32::from_le_bytes(rest[..4].try_into().unwrap()) as usize;
        rest = &rest[4..];
        if rest.len() < 4 * n {
            return Err(bad(format!("document {} truncated", docs.len())));
        }
        let doc = rest[..4 * n]
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        rest = &rest[4 * n..];
        docs.push(doc);
    }
    Ok(docs)
}

pub fn read_token_shard(path: &Path) -> Result<Vec<Vec<TokenId>>> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    decode_token_shard(&bytes, path)
}

/// Packed-sequence file layout (all integers little-endian):
///
/// ```text
/// magic     b"MTPK"
/// version   u16 = 1
/// id_width  u8  = 4 (bytes per token id)
/// reserved  u8  = 0
/// seq_len   u32
/// then the sequences back to back, seq_len ids each
/// ```
pub const PACK_MAGIC: &[u8; 4] = b"MTPK";
pub const PACK_VERSION: u16 = 1;
pub const PACK_ID_WIDTH: u8 = 4;
pub const PACK_HEADER_LEN: usize = 12;

pub fn write_pack_header(w: &mut dyn Write, seq_len: u32) -> std::io::Result<()> {
    w.write_all(PACK_MAGIC)?;
    w.write_all(&PACK_VERSION.to_le_bytes())?;
    w.write_all(&[PACK_ID_WIDTH, 0])?;
    w.write_all(&seq_len.to_le_bytes())
}

pub fn write_pack_sequence(w: &mut dyn Write, seq: &[TokenId]) -> std::io::Result<()> {
    for id in seq {
        w.write_all(&id.to_le_bytes())?;
    }
    Ok(())
}

/// Parses a packed file into (seq_len, sequences).
pub fn decode_packed(bytes: &[u8], path: &Path) -> Result<(usize, Vec<Vec<TokenId>>)> {
    let bad = |message: String| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        message,
    };
    if bytes.len() < PACK_HEADER_LEN || &bytes[..4] != PACK_MAGIC {
        return Err(bad("not a packed-sequence file (bad magic)".into()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != PACK_VERSION || bytes[6] != PACK_ID_WIDTH {
        return Err(bad(format!("unsupported version {version} / id width {}", bytes[6])));
    }
    let seq_len = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let body = &bytes[PACK_HEADER_LEN..];
    let stride = seq_len * PACK_ID_WIDTH as usize;
    if seq_len == 0 || !body.len().is_multiple_of(stride) {
        return Err(bad(format!("body of {} bytes is not a whole number of sequences", body.len())));
    }
    let seqs = body
        .chunks_exact(stride)
        .map(|c| c.chunks_exact(4).map(|b| u32::from_le_bytes(b.try_into().unwrap())).collect())
        .collect();
    Ok((seq_len, seqs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shard_round_trip_and_truncation() {
        let docs = vec![vec![1, 2, 3], vec![], vec![u32::MAX]];
        let bytes = encode_token_shard(&docs);
        assert_eq!(&bytes[..8], b"MTSH\x01\0\0\0");
        assert_eq!(decode_token_shard(&bytes, Path::new("s")).unwrap(), docs);
        assert!(decode_token_shard(&bytes[..bytes.len() - 1], Path::new("s")).is_err());
        assert!(decode_token_shard(b"XXXX\x01\0\0\0", Path::new("s")).is_err());
    }

    #[test]
    fn pack_header_layout() {
        let mut buf = Vec::new();
        write_pack_header(&mut buf, 2048).unwrap();
        write_pack_sequence(&mut buf, &vec![7; 2048]).unwrap();
        assert_eq!(&buf[..12], b"MTPK\x01\x00\x04\x00\x00\x08\x00\x00");
        let (len, seqs) = decode_packed(&buf, Path::new("p")).unwrap();
        assert_eq!((len, seqs.len()), (2048, 1));
        assert!(decode_packed(&buf[..buf.len() - 4], Path::new("p")).is_err());
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn read_lines_handles_crlf() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("l.txt");
        fs::write(&p, "a\r\nb\n").unwrap();
        assert_eq!(read_lines(&p).unwrap(), ["a", "b"]);
    }
}
