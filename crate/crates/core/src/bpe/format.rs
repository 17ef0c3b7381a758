//! Vocab (`vocab.json`) and merges (`merges.txt`) files.
//!
//! Token byte strings are written with the usual byte-level BPE byte→char
//! table: printable Latin-1 bytes map to themselves and the remaining 68
//! bytes map to U+0100 onwards, so every token is a whitespace-free JSON
//! string and merges lines split unambiguously on a single space.

use std::path::Path;
use std::sync::OnceLock;

use super::{TokenId, Tokenizer};
use crate::io::{read_to_string, write_atomic};
use crate::{Error, Result};

pub const VOCAB_FILE: &str = "vocab.json";
pub const MERGES_FILE: &str = "merges.txt";
pub const MERGES_VERSION_HEADER: &str = "#version: 0.2";

struct ByteTable {
    to_char: [char; 256],
    // indexed by code point; only 0..=0x143 are used
    to_byte: Vec<Option<u8>>,
}

fn byte_table() -> &'static ByteTable {
    static TABLE: OnceLock<ByteTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut to_char = ['\0'; 256];
        let mut extra = 0u32;
        for b in 0..=255u8 {
            let printable = matches!(b, b'!'..=b'~' | 0xA1..=0xAC | 0xAE..=0xFF);
            to_char[b as usize] = if printable {
                char::from(b)
            } else {
                extra += 1;
                char::from_u32(255 + extra).unwrap()
            };
        }
        let mut to_byte = vec![None; 0x144];
        for (b, &c) in to_char.iter().enumerate() {
            to_byte[c as usize] = Some(b as u8);
        }
        ByteTable { to_char, to_byte }
    })
}

pub fn bytes_to_token_str(bytes: &[u8]) -> String {
    let table = byte_table();
    bytes.iter().map(|&b| table.to_char[b as usize]).collect()
}

pub fn token_str_to_bytes(s: &str) -> Option<Vec<u8>> {
    let table = byte_table();
    s.chars()
        .map(|c| table.to_byte.get(c as usize).copied().flatten())
        .collect()
}

impl Tokenizer {
    /// Vocab file contents: a JSON object in id order, one entry per line.
    pub fn to_vocab_json(&self) -> String {
        let mut out = String::from("{\n");
        for (id, tok) in self.tokens.iter().enumerate() {
            if id > 0 {
                out.push_str(",\n");
            }
            let key = serde_json::to_string(&bytes_to_token_str(tok)).expect("string serializes");
            out.push_str(&format!("  {key}: {id}"));
        }
        out.push_str("\n}\n");
        out
    }

    pub fn to_merges_text(&self) -> String {
        let mut out = String::from(MERGES_VERSION_HEADER);
        out.push('\n');
        for (l, r) in self.merges() {
            out.push_str(&bytes_to_token_str(l));
            out.push(' ');
            out.push_str(&bytes_to_token_str(r));
            out.push('\n');
        }
        out
    }

    /// Parses vocab and merges file contents. `vocab_name`/`merges_name`
    /// are only used in error messages.
    pub fn from_file_contents(vocab_json: &str, merges_text: &str, vocab_name: &Path, merges_name: &Path) -> Result<Self> {
        let map: serde_json::Map<String, serde_json::Value> =
            serde_json::from_str(vocab_json).map_err(|e| Error::Parse {
                path: vocab_name.to_path_buf(),
                line: e.line(),
                message: e.to_string(),
            })?;
        let mut tokens: Vec<Option<Vec<u8>>> = vec![None; map.len()];
        for (key, value) in &map {
            let bad = |message: String| Error::Parse {
                path: vocab_name.to_path_buf(),
                line: 0,
                message,
            };
            let id = value
                .as_u64()
                .ok_or_else(|| bad(format!("id for {key:?} is not a non-negative integer")))?;
            let bytes = token_str_to_bytes(key).ok_or_else(|| bad(format!("token {key:?} uses characters outside the byte table")))?;
            let slot = tokens
                .get_mut(id as usize)
                .ok_or_else(|| bad(format!("id {id} is not dense (vocabulary has {} entries)", map.len())))?;
            if slot.is_some() {
                return Err(bad(format!("id {id} is assigned twice")));
            }
            *slot = Some(bytes);
        }
        let tokens: Vec<Vec<u8>> = tokens.into_iter().map(|t| t.expect("dense ids fill every slot")).collect();

        let mut merges = Vec::new();
        for (i, line) in merges_text.lines().enumerate() {
            if (i == 0 && line.starts_with("#version")) || line.is_empty() {
                continue;
            }
            let bad = |message: String| Error::Parse {
                path: merges_name.to_path_buf(),
                line: i + 1,
                message,
            };
            let mut parts = line.split(' ');
            let (Some(l), Some(r), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(bad(format!("expected `left right`, got {line:?}")));
            };
            let l = token_str_to_bytes(l).ok_or_else(|| bad(format!("bad token {l:?}")))?;
            let r = token_str_to_bytes(r).ok_or_else(|| bad(format!("bad token {r:?}")))?;
            merges.push((l, r));
        }
        Tokenizer::from_parts(tokens, merges)
    }

    pub fn save(&self, vocab_path: &Path, merges_path: &Path) -> Result<()> {
        write_atomic(vocab_path, self.to_vocab_json().as_bytes())?;
        write_atomic(merges_path, self.to_merges_text().as_bytes())
    }

    pub fn load(vocab_path: &Path, merges_path: &Path) -> Result<Self> {
        let vocab = read_to_string(vocab_path)?;
        let merges = read_to_string(merges_path)?;
        Self::from_file_contents(&vocab, &merges, vocab_path, merges_path)
    }

    /// Writes `vocab.json` and `merges.txt` into `dir`.
    pub fn save_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.save(&dir.join(VOCAB_FILE), &dir.join(MERGES_FILE))
    }

    pub fn load_dir(dir: &Path) -> Result<Self> {
        Self::load(&dir.join(VOCAB_FILE), &dir.join(MERGES_FILE))
    }

    /// Id of a token given in its file (byte-table) spelling.
    pub fn token_id_of_str(&self, token: &str) -> Option<TokenId> {
        token_str_to_bytes(token).and_then(|b| self.token_id(&b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bpe::{train_bpe, TrainParams};

    #[test]
    fn byte_table_is_bijective_and_space_free() {
        let all: Vec<u8> = (0..=255).collect();
        let s = bytes_to_token_str(&all);
        assert_eq!(s.chars().count(), 256);
        assert!(!s.chars().any(char::is_whitespace));
        assert_eq!(token_str_to_bytes(&s).unwrap(), all);
        assert_eq!(bytes_to_token_str(b" "), "\u{120}");
        assert_eq!(token_str_to_bytes("\u{4e00}"), None);
    }

    #[test]
    fn files_round_trip_bit_exactly() {
        let t = train_bpe(&["hello world, hello there\n\"quoted\" žluťoučký kůň"], &TrainParams {
            target_vocab_size: 300,
            min_pair_frequency: 1,
            ..Default::default()
        })
        .unwrap();
        let vocab = t.to_vocab_json();
        let merges = t.to_merges_text();
        assert!(merges.starts_with("#version: 0.2\n"));
        let back = Tokenizer::from_file_contents(&vocab, &merges, Path::new("v"), Path::new("m")).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_vocab_json(), vocab);
        assert_eq!(back.to_merges_text(), merges);
    }

    #[test]
    fn merges_without_header_load() {
        let t = Tokenizer::byte_level();
        let mut vocab: Vec<Vec<u8>> = t.tokens().map(<[u8]>::to_vec).collect();
        vocab.push(b"ab".to_vec());
        let t = Tokenizer::from_parts(vocab, [(b"a", b"b")]).unwrap();
        let back = Tokenizer::from_file_contents(&t.to_vocab_json(), "a b\n", Path::new("v"), Path::new("m")).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let t = Tokenizer::byte_level();
        let err = Tokenizer::from_file_contents(&t.to_vocab_json(), "#version: 0.2\na b c\n", Path::new("v"), Path::new("m.txt"))
            .unwrap_err();
        assert!(err.to_string().starts_with("m.txt:2:"), "{err}");
        let err = Tokenizer::from_file_contents("{\"a\": 5}", "", Path::new("v.json"), Path::new("m")).unwrap_err();
        assert!(err.to_string().contains("not dense"), "{err}");
    }
}
