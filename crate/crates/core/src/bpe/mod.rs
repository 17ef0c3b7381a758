//! Byte-level BPE.
//!
//! Text is pre-split into maximal runs of whitespace and non-whitespace
//! characters; merges are learned and applied inside those pieces only, so a
//! merge never straddles a whitespace boundary. Every tokenizer carries the
//! 256 single-byte tokens, which makes encoding total over arbitrary UTF-8.

mod encode;
mod format;
mod train;

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt;

use unicode_normalization::UnicodeNormalization;

use crate::{Error, Result};

pub use format::{bytes_to_token_str, token_str_to_bytes, MERGES_FILE, MERGES_VERSION_HEADER, VOCAB_FILE};
pub use train::{train_bpe, TrainParams};

pub type TokenId = u32;

/// Text normalization applied to training input.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    #[default]
    Identity,
    Nfc,
}

impl Normalization {
    pub fn apply<'a>(&self, text: &'a str) -> Cow<'a, str> {
        match self {
            Normalization::Identity => Cow::Borrowed(text),
            Normalization::Nfc => Cow::Owned(text.nfc().collect()),
        }
    }
}

/// Splits text into maximal runs of whitespace and of non-whitespace chars.
/// The pieces concatenate back to `text`.
pub fn pre_split(text: &str) -> impl Iterator<Item = &str> {
    let mut rest = text;
    std::iter::from_fn(move || {
        let first = rest.chars().next()?;
        let ws = first.is_whitespace();
        let end = rest
            .char_indices()
            .find(|&(_, c)| c.is_whitespace() != ws)
            .map_or(rest.len(), |(i, _)| i);
        let (piece, tail) = rest.split_at(end);
        rest = tail;
        Some(piece)
    })
}

/// An immutable byte-level BPE tokenizer: a dense id → bytes vocabulary
/// plus a rank-ordered merge table.
#[derive(Clone)]
pub struct Tokenizer {
    tokens: Vec<Vec<u8>>,
    ids: HashMap<Vec<u8>, TokenId>,
    merges: Vec<(TokenId, TokenId)>,
    // (left, right) -> (rank, merged id)
    merge_lookup: HashMap<(TokenId, TokenId), (u32, TokenId)>,
    byte_ids: [TokenId; 256],
}

impl fmt::Debug for Tokenizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tokenizer")
            .field("vocab_size", &self.tokens.len())
            .field("merges", &self.merges.len())
            .finish()
    }
}

impl PartialEq for Tokenizer {
    fn eq(&self, other: &Self) -> bool {
        self.tokens == other.tokens && self.merges == other.merges
    }
}

impl Eq for Tokenizer {}

impl Tokenizer {
    /// The 256 single-byte tokens with id == byte value and no merges.
    pub fn byte_level() -> Self {
        let tokens = (0..=255u8).map(|b| vec![b]).collect();
        Self::from_ids(tokens, Vec::new()).expect("byte-level tokenizer is valid")
    }

    /// Builds a tokenizer from an id-ordered token list and merges given as
    /// token byte strings, validating every structural invariant.
    pub fn from_parts<L, R>(tokens: Vec<Vec<u8>>, merges: impl IntoIterator<Item = (L, R)>) -> Result<Self>
    where
        L: AsRef<[u8]>,
        R: AsRef<[u8]>,
    {
        let ids = index_tokens(&tokens)?;
        let mut merge_ids = Vec::new();
        for (left, right) in merges {
            let (left, right) = (left.as_ref(), right.as_ref());
            let lookup = |t: &[u8]| {
                ids.get(t).copied().ok_or_else(|| {
                    Error::InvalidTokenizer(format!(
                        "merge ({}, {}) references unknown token {}",
                        bytes_to_token_str(left),
                        bytes_to_token_str(right),
                        bytes_to_token_str(t)
                    ))
                })
            };
            merge_ids.push((lookup(left)?, lookup(right)?));
        }
        Self::from_ids(tokens, merge_ids)
    }

    pub(crate) fn from_ids(tokens: Vec<Vec<u8>>, merges: Vec<(TokenId, TokenId)>) -> Result<Self> {
        let ids = index_tokens(&tokens)?;
        let mut byte_ids = [0; 256];
        for b in 0..=255u8 {
            byte_ids[b as usize] = *ids.get(&[b][..]).ok_or_else(|| {
                Error::InvalidTokenizer(format!("single-byte token 0x{b:02x} is missing"))
            })?;
        }
        let mut merge_lookup = HashMap::with_capacity(merges.len());
        for (rank, &(left, right)) in merges.iter().enumerate() {
            let concat = [tokens[left as usize].as_slice(), tokens[right as usize].as_slice()].concat();
            let merged = *ids.get(&concat).ok_or_else(|| {
                Error::InvalidTokenizer(format!(
                    "merge result {} is not in the vocabulary",
                    bytes_to_token_str(&concat)
                ))
            })?;
            if merge_lookup.insert((left, right), (rank as u32, merged)).is_some() {
                return Err(Error::InvalidTokenizer(format!(
                    "duplicate merge ({}, {})",
                    bytes_to_token_str(&tokens[left as usize]),
                    bytes_to_token_str(&tokens[right as usize])
                )));
            }
        }
        Ok(Tokenizer {
            tokens,
            ids,
            merges,
            merge_lookup,
            byte_ids,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.tokens.len()
    }

    pub fn num_merges(&self) -> usize {
        self.merges.len()
    }

    pub fn token_bytes(&self, id: TokenId) -> Option<&[u8]> {
        self.tokens.get(id as usize).map(Vec::as_slice)
    }

    pub fn token_id(&self, bytes: &[u8]) -> Option<TokenId> {
        self.ids.get(bytes).copied()
    }

    /// Tokens in id order.
    pub fn tokens(&self) -> impl ExactSizeIterator<Item = &[u8]> + '_ {
        self.tokens.iter().map(Vec::as_slice)
    }

    /// Merges in rank order as (left, right) id pairs.
    pub fn merge_ids(&self) -> &[(TokenId, TokenId)] {
        &self.merges
    }

    /// Merges in rank order as (left, right) byte strings.
    pub fn merges(&self) -> impl ExactSizeIterator<Item = (&[u8], &[u8])> + '_ {
        self.merges
            .iter()
            .map(|&(l, r)| (self.tokens[l as usize].as_slice(), self.tokens[r as usize].as_slice()))
    }

    /// Rank of the merge (left, right), if present.
    pub fn merge_rank(&self, left: TokenId, right: TokenId) -> Option<u32> {
        self.merge_lookup.get(&(left, right)).map(|&(rank, _)| rank)
    }

    pub fn encode(&self, text: &str) -> Vec<TokenId> {
        let mut out = Vec::with_capacity(text.len() / 2);
        for piece in pre_split(text) {
            self.encode_piece(piece.as_bytes(), &mut out);
        }
        out
    }

    /// Token count of `text`, without materializing the ids.
    pub fn count_tokens(&self, text: &str) -> usize {
        let mut buf = Vec::new();
        let mut n = 0;
        for piece in pre_split(text) {
            buf.clear();
            self.encode_piece(piece.as_bytes(), &mut buf);
            n += buf.len();
        }
        n
    }

    pub fn decode_bytes(&self, ids: &[TokenId]) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(ids.len() * 2);
        for &id in ids {
            let bytes = self.token_bytes(id).ok_or(Error::IdOutOfRange {
                id,
                vocab_size: self.tokens.len(),
            })?;
            out.extend_from_slice(bytes);
        }
        Ok(out)
    }

    /// Concatenates token bytes. Fails on out-of-range ids or when the ids
    /// do not concatenate to valid UTF-8.
    pub fn decode(&self, ids: &[TokenId]) -> Result<String> {
        String::from_utf8(self.decode_bytes(ids)?)
            .map_err(|e| Error::InvalidTokenizer(format!("decoded bytes are not UTF-8: {e}")))
    }
}

fn index_tokens(tokens: &[Vec<u8>]) -> Result<HashMap<Vec<u8>, TokenId>> {
    if tokens.len() > u32::MAX as usize {
        return Err(Error::InvalidTokenizer("vocabulary exceeds u32 ids".into()));
    }
    let mut ids = HashMap::with_capacity(tokens.len());
    for (id, tok) in tokens.iter().enumerate() {
        if tok.is_empty() {
            return Err(Error::InvalidTokenizer(format!("token {id} is empty")));
        }
        if let Some(prev) = ids.insert(tok.clone(), id as TokenId) {
            return Err(Error::InvalidTokenizer(format!(
                "token {} appears with ids {prev} and {id}",
                bytes_to_token_str(tok)
            )));
        }
    }
    Ok(ids)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab_tokenizer() -> Tokenizer {
        let mut tokens: Vec<Vec<u8>> = (0..=255u8).map(|b| vec![b]).collect();
        tokens.push(b"ab".to_vec());
        Tokenizer::from_parts(tokens, [(b"a", b"b")]).unwrap()
    }

    #[test]
    fn pre_split_alternates_runs() {
        let pieces: Vec<_> = pre_split("ab  cd\u{3000}é\n").collect();
        assert_eq!(pieces, ["ab", "  ", "cd", "\u{3000}", "é", "\n"]);
        assert_eq!(pre_split("").count(), 0);
    }

    #[test]
    fn byte_only_encodes_one_id_per_byte() {
        let t = Tokenizer::byte_level();
        assert_eq!(t.encode("ab"), vec![97, 98]);
        assert_eq!(t.encode("žluť").len(), "žluť".len());
    }

    #[test]
    fn single_merge_applies() {
        let t = ab_tokenizer();
        assert_eq!(t.encode("abab"), vec![256, 256]);
        assert_eq!(t.encode("aab"), vec![97, 256]);
        assert_eq!(t.count_tokens("abab ab"), 4);
    }

    #[test]
    fn decode_edges() {
        let t = ab_tokenizer();
        assert_eq!(t.decode(&[]).unwrap(), "");
        let s = "žluťoučký";
        assert_eq!(t.decode(&t.encode(s)).unwrap(), s);
        assert!(matches!(
            t.decode(&[t.vocab_size() as u32]),
            Err(Error::IdOutOfRange { id: 257, vocab_size: 257 })
        ));
    }

    #[test]
    fn rejects_broken_tables() {
        let bytes: Vec<Vec<u8>> = (0..=255u8).map(|b| vec![b]).collect();
        // missing byte
        assert!(Tokenizer::from_parts(bytes[1..].to_vec(), Vec::<(&[u8], &[u8])>::new()).is_err());
        // duplicate token
        let mut dup = bytes.clone();
        dup.push(vec![b'a']);
        assert!(Tokenizer::from_parts(dup, Vec::<(&[u8], &[u8])>::new()).is_err());
        // merge result absent
        assert!(Tokenizer::from_parts(bytes.clone(), [(b"a", b"b")]).is_err());
        // duplicate merge
        let mut with_ab = bytes;
        with_ab.push(b"ab".to_vec());
        assert!(Tokenizer::from_parts(with_ab, [(b"a", b"b"), (b"a", b"b")]).is_err());
    }

    #[test]
    fn nfc_composes() {
        assert_eq!(Normalization::Nfc.apply("e\u{301}"), "\u{e9}");
        assert_eq!(Normalization::Identity.apply("e\u{301}"), "e\u{301}");
    }
}
