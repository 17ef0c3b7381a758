//! Vocabulary extension: train a standalone tokenizer on monolingual text
//! from underrepresented languages, then append its novel tokens and merges
//! to a base tokenizer.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::bpe::{train_bpe, TokenId, Tokenizer, TrainParams};
use crate::{Error, Result};

/// Languages whose sub-words are added by default, chosen for their high
/// length ratios under the base tokenizer.
pub const DEFAULT_EXTENSION_LANGUAGES: [&str; 4] = ["zh", "ja", "hi", "is"];

/// Default size of the extension vocabulary.
pub const DEFAULT_EXTENSION_SIZE: usize = 12_000;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub added_tokens: usize,
    pub skipped_duplicates: usize,
    pub added_merges: usize,
    pub skipped_merges: usize,
    pub per_language_inputs: BTreeMap<String, usize>,
}

/// Interleaves documents round-robin across languages (in language-code
/// order) until every corpus is exhausted.
pub fn interleave<S: AsRef<str>>(corpora: &BTreeMap<String, Vec<S>>) -> Vec<&str> {
    let longest = corpora.values().map(Vec::len).max().unwrap_or(0);
    let mut out = Vec::with_capacity(corpora.values().map(Vec::len).sum());
    for i in 0..longest {
        for docs in corpora.values() {
            if let Some(d) = docs.get(i) {
                out.push(d.as_ref());
            }
        }
    }
    out
}

/// Trains the extension vocabulary on the round-robin interleaving of the
/// per-language corpora. `params.target_vocab_size` is the extension size.
pub fn train_extension_vocab<S: AsRef<str>>(corpora: &BTreeMap<String, Vec<S>>, params: &TrainParams) -> Result<Tokenizer> {
    let docs = interleave(corpora);
    if docs.is_empty() {
        return Err(Error::EmptyCorpus("every extension corpus is empty".into()));
    }
    train_bpe(&docs, params)
}

/// Appends `ext` to `base`.
///
/// Base ids and merge ranks are untouched. Extension tokens missing from the
/// base get ids `|base|, |base|+1, ...` in extension-id order; extension
/// merges not already in the base are appended in extension rank order.
/// Tokens and merges are matched by byte string, never by id.
pub fn merge_vocabularies(base: &Tokenizer, ext: &Tokenizer) -> Result<(Tokenizer, ExtensionReport)> {
    let mut report = ExtensionReport::default();
    let mut tokens: Vec<Vec<u8>> = base.tokens().map(<[u8]>::to_vec).collect();
    for tok in ext.tokens() {
        if tok.len() == 1 {
            continue;
        }
        if base.token_id(tok).is_some() {
            report.skipped_duplicates += 1;
        } else {
            tokens.push(tok.to_vec());
            report.added_tokens += 1;
        }
    }

    let mut merges: Vec<(&[u8], &[u8])> = base.merges().collect();
    let mut seen: HashSet<(&[u8], &[u8])> = merges.iter().copied().collect();
    for (l, r) in ext.merges() {
        if seen.insert((l, r)) {
            merges.push((l, r));
            report.added_merges += 1;
        } else {
            report.skipped_merges += 1;
        }
    }

    let merged = Tokenizer::from_parts(tokens, merges)?;
    Ok((merged, report))
}

/// Trains an extension on `corpora` and merges it into `base`, filling in
/// the per-language input counts.
pub fn extend_vocabulary<S: AsRef<str>>(
    base: &Tokenizer,
    corpora: &BTreeMap<String, Vec<S>>,
    params: &TrainParams,
) -> Result<(Tokenizer, ExtensionReport)> {
    let ext = train_extension_vocab(corpora, params)?;
    let (merged, mut report) = merge_vocabularies(base, &ext)?;
    report.per_language_inputs = corpora.iter().map(|(l, d)| (l.clone(), d.len())).collect();
    Ok((merged, report))
}

/// Whether every base token keeps its id in `merged`.
pub fn ids_stable(base: &Tokenizer, merged: &Tokenizer) -> bool {
    base.tokens()
        .enumerate()
        .all(|(id, tok)| merged.token_id(tok) == Some(id as TokenId))
}
