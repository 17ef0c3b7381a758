//! Temperature-based language sampling, a seeded corpus mixer, and
//! fixed-length sequence packing for continued pre-training.
//!
//! The plan gives English a fixed share (1/10 by default) and splits the
//! rest across the other languages proportionally to `D_l^(1/T)`, where
//! `D_l` is the language's word count and `T` the temperature.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::bpe::TokenId;
use crate::{Error, Execution, Result};

pub const DEFAULT_TEMPERATURE: f64 = 6.0;
pub const DEFAULT_ENGLISH_SHARE: f64 = 0.1;
pub const DEFAULT_SEQ_LEN: usize = 2048;

/// Published continued-pre-training sampling probabilities
/// (cs, de, en, es, hi, is, ja, ru, uk, zh).
pub const REFERENCE_PROBABILITIES: [(&str, f64); 10] = [
    ("cs", 0.1),
    ("de", 0.13),
    ("en", 0.1),
    ("es", 0.13),
    ("hi", 0.08),
    ("is", 0.05),
    ("ja", 0.08),
    ("ru", 0.13),
    ("uk", 0.08),
    ("zh", 0.12),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageStats {
    pub english_code: String,
    /// Whitespace-delimited word counts per language, English included.
    pub word_counts: BTreeMap<String, u64>,
}

impl LanguageStats {
    pub fn new(english_code: impl Into<String>, word_counts: BTreeMap<String, u64>) -> Self {
        LanguageStats {
            english_code: english_code.into(),
            word_counts,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.word_counts.contains_key(&self.english_code) {
            return Err(Error::InvalidSampling(format!("no word count for English (`{}`)", self.english_code)));
        }
        if !self
            .word_counts
            .iter()
            .any(|(l, &d)| *l != self.english_code && d > 0)
        {
            return Err(Error::InvalidSampling("every non-English word count is zero".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub probabilities: BTreeMap<String, f64>,
    pub english_code: String,
    /// `None` for plans supplied directly rather than computed.
    pub temperature: Option<f64>,
    pub english_share: f64,
    pub non_english_share: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub word_counts: BTreeMap<String, u64>,
}

/// Computes the sampling plan with the default English share.
pub fn compute_plan(stats: &LanguageStats, temperature: f64) -> Result<SamplingPlan> {
    compute_plan_with_share(stats, temperature, DEFAULT_ENGLISH_SHARE)
}

pub fn compute_plan_with_share(stats: &LanguageStats, temperature: f64, english_share: f64) -> Result<SamplingPlan> {
    if !temperature.is_finite() || temperature <= 0.0 {
        return Err(Error::InvalidSampling(format!("temperature must be positive and finite, got {temperature}")));
    }
    if !(0.0..1.0).contains(&english_share) {
        return Err(Error::InvalidSampling(format!("English share must lie in [0, 1), got {english_share}")));
    }
    stats.validate()?;
    let non_english_share = 1.0 - english_share;

    // Scaling by the largest count keeps D^(1/T) in range at small T;
    // the common factor cancels in the normalization.
    let max = stats
        .word_counts
        .iter()
        .filter(|(l, _)| **l != stats.english_code)
        .map(|(_, &d)| d)
        .max()
        .unwrap_or(1) as f64;
    let weights: Vec<(&String, f64)> = stats
        .word_counts
        .iter()
        .filter(|(l, _)| **l != stats.english_code)
        .map(|(l, &d)| (l, if d == 0 { 0.0 } else { (d as f64 / max).powf(1.0 / temperature) }))
        .collect();
    let total: f64 = weights.iter().map(|(_, w)| w).sum();

    let mut probabilities: BTreeMap<String, f64> = weights
        .into_iter()
        .map(|(l, w)| (l.clone(), non_english_share * w / total))
        .collect();
    probabilities.insert(stats.english_code.clone(), english_share);
    Ok(SamplingPlan {
        probabilities,
        english_code: stats.english_code.clone(),
        temperature: Some(temperature),
        english_share,
        non_english_share,
        word_counts: stats.word_counts.clone(),
    })
}

impl SamplingPlan {
    /// Wraps an externally supplied probability vector; the English share is
    /// read off the vector. Call [`SamplingPlan::validate`] to check it.
    pub fn from_probabilities(english_code: impl Into<String>, probabilities: BTreeMap<String, f64>) -> Result<Self> {
        let english_code = english_code.into();
        let english_share = *probabilities
            .get(&english_code)
            .ok_or_else(|| Error::InvalidSampling(format!("plan has no entry for English (`{english_code}`)")))?;
        Ok(SamplingPlan {
            probabilities,
            english_code,
            temperature: None,
            english_share,
            non_english_share: 1.0 - english_share,
            word_counts: BTreeMap::new(),
        })
    }

    /// The published ten-language vector.
    pub fn reference() -> Self {
        let probs = REFERENCE_PROBABILITIES.iter().map(|&(l, p)| (l.to_string(), p)).collect();
        Self::from_probabilities("en", probs).expect("reference vector includes en")
    }

    /// Checks the plan invariants: probabilities in [0, 1], total 1, English
    /// exactly at its share, non-English summing to the remaining share.
    pub fn validate(&self, tolerance: f64) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSampling(m));
        if let Some((l, p)) = self.probabilities.iter().find(|(_, &p)| !(0.0..=1.0).contains(&p)) {
            return bad(format!("P({l}) = {p} is outside [0, 1]"));
        }
        match self.probabilities.get(&self.english_code) {
            Some(&p) if p == self.english_share => {}
            other => return bad(format!("P({}) = {other:?}, expected {}", self.english_code, self.english_share)),
        }
        let total: f64 = self.probabilities.values().sum();
        if (total - 1.0).abs() > tolerance {
            return bad(format!("probabilities sum to {total}"));
        }
        let non_english: f64 = self
            .probabilities
            .iter()
            .filter(|(l, _)| **l != self.english_code)
            .map(|(_, p)| p)
            .sum();
        if (non_english - self.non_english_share).abs() > tolerance {
            return bad(format!("non-English probabilities sum to {non_english}, expected {}", self.non_english_share));
        }
        Ok(())
    }

    pub fn probability(&self, lang: &str) -> f64 {
        self.probabilities.get(lang).copied().unwrap_or(0.0)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plan serializes");
        s.push('\n');
        s
    }

    /// Reads a plan written by [`SamplingPlan::to_json`], or a bare
    /// `{"english_code", "probabilities"}` object whose English share is
    /// taken from the vector.
    pub fn from_json(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Bare {
            #[serde(default = "default_english")]
            english_code: String,
            probabilities: BTreeMap<String, f64>,
        }
        fn default_english() -> String {
            "en".into()
        }
        let v: serde_json::Value = serde_json::from_str(s)?;
        if v.get("english_share").is_some() {
            return Ok(serde_json::from_value(v)?);
        }
        let b: Bare = serde_json::from_value(v)?;
        Self::from_probabilities(b.english_code, b.probabilities)
    }
}

/// Number of maximal non-whitespace runs, summed over documents.
pub fn count_words<S: AsRef<str> + Sync>(docs: &[S]) -> u64 {
    count_words_with(docs, Execution::default())
}

pub fn count_words_with<S: AsRef<str> + Sync>(docs: &[S], execution: Execution) -> u64 {
    execution.fold_reduce(
        docs,
        || 0u64,
        |acc, d| acc + d.as_ref().split_whitespace().count() as u64,
        |a, b| a + b,
    )
}

/// One document drawn by the mixer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MixedDocument<'a, D> {
    pub language: &'a str,
    pub doc: &'a D,
    /// Position within the language's shard.
    pub shard_index: usize,
    /// How many times the shard has wrapped before this draw.
    pub epoch: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixStats {
    pub draws: BTreeMap<String, usize>,
    /// Completed passes over each shard.
    pub epochs: BTreeMap<String, usize>,
}

/// Seeded mixer over per-language shards.
///
/// The language of each draw is sampled i.i.d. from the plan with a
/// `ChaCha20Rng` seeded through `SeedableRng::seed_from_u64`, so a given
/// (plan, shards, seed) yields the same stream on every platform. Within a
/// language documents are taken in shard order, wrapping around when the
/// shard runs out.
pub struct CorpusMixer<'a, D> {
    languages: Vec<&'a str>,
    shards: Vec<&'a [D]>,
    cursors: Vec<usize>,
    epochs: Vec<usize>,
    draws: Vec<usize>,
    dist: WeightedIndex<f64>,
    rng: ChaCha20Rng,
    remaining: usize,
}

impl<'a, D> CorpusMixer<'a, D> {
    pub fn new(plan: &'a SamplingPlan, shards: &'a BTreeMap<String, Vec<D>>, seed: u64, total_docs: usize) -> Result<Self> {
        let mut languages = Vec::new();
        let mut slices = Vec::new();
        let mut weights = Vec::new();
        for (lang, &p) in &plan.probabilities {
            let shard = shards.get(lang).ok_or_else(|| Error::MissingShard(lang.clone()))?;
            if p > 0.0 && shard.is_empty() {
                return Err(Error::InvalidSampling(format!("shard for `{lang}` is empty but P = {p}")));
            }
            languages.push(lang.as_str());
            slices.push(shard.as_slice());
            weights.push(p);
        }
        let dist = WeightedIndex::new(&weights).map_err(|e| Error::InvalidSampling(format!("plan cannot be sampled: {e}")))?;
        let n = languages.len();
        Ok(CorpusMixer {
            languages,
            shards: slices,
            cursors: vec![0; n],
            epochs: vec![0; n],
            draws: vec![0; n],
            dist,
            rng: ChaCha20Rng::seed_from_u64(seed),
            remaining: total_docs,
        })
    }

    pub fn stats(&self) -> MixStats {
        let by_lang = |v: &[usize]| self.languages.iter().map(|l| l.to_string()).zip(v.iter().copied()).collect();
        MixStats {
            draws: by_lang(&self.draws),
            epochs: by_lang(&self.epochs),
        }
    }
}

impl<'a, D> Iterator for CorpusMixer<'a, D> {
    type Item = MixedDocument<'a, D>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let li = self.dist.sample(&mut self.rng);
        let shard = self.shards[li];
        let index = self.cursors[li];
        let item = MixedDocument {
            language: self.languages[li],
            doc: &shard[index],
            shard_index: index,
            epoch: self.epochs[li],
        };
        self.draws[li] += 1;
        self.cursors[li] += 1;
        if self.cursors[li] == shard.len() {
            self.cursors[li] = 0;
            self.epochs[li] += 1;
        }
        Some(item)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

/// Draws `total_docs` documents; see [`CorpusMixer`].
pub fn mix_corpus<'a, D>(
    plan: &'a SamplingPlan,
    shards: &'a BTreeMap<String, Vec<D>>,
    seed: u64,
    total_docs: usize,
) -> Result<(Vec<MixedDocument<'a, D>>, MixStats)> {
    let mut mixer = CorpusMixer::new(plan, shards, seed, total_docs)?;
    let docs: Vec<_> = mixer.by_ref().collect();
    Ok((docs, mixer.stats()))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackStats {
    pub documents: usize,
    pub document_tokens: usize,
    pub sequences: usize,
    /// Tokens left in the final partial sequence, which is discarded.
    pub dropped: usize,
}

/// Concatenates documents, each followed by one end-of-document id, and
/// cuts the stream into sequences of exactly `seq_len` ids. Documents may
/// span sequence boundaries.
pub struct SequencePacker {
    seq_len: usize,
    eod_id: TokenId,
    buf: Vec<TokenId>,
    stats: PackStats,
}

impl SequencePacker {
    pub fn new(seq_len: usize, eod_id: TokenId) -> Result<Self> {
        if seq_len == 0 {
            return Err(Error::InvalidSampling("sequence length must be positive".into()));
        }
        Ok(SequencePacker {
            seq_len,
            eod_id,
            buf: Vec::with_capacity(seq_len),
            stats: PackStats::default(),
        })
    }

    /// Adds one document and hands every completed sequence to `emit`,
    /// stopping at the first error it returns.
    pub fn push<F, E>(&mut self, doc: &[TokenId], mut emit: F) -> std::result::Result<(), E>
    where
        F: FnMut(&[TokenId]) -> std::result::Result<(), E>,
    {
        self.stats.documents += 1;
        self.stats.document_tokens += doc.len();
        for &id in doc.iter().chain(std::iter::once(&self.eod_id)) {
            self.buf.push(id);
            if self.buf.len() == self.seq_len {
                emit(&self.buf)?;
                self.buf.clear();
                self.stats.sequences += 1;
            }
        }
        Ok(())
    }

    /// Drops the partial tail and returns the accounting.
    pub fn finish(mut self) -> PackStats {
        self.stats.dropped = self.buf.len();
        self.stats
    }
}

pub fn pack_sequences<I, T>(docs: I, seq_len: usize, eod_id: TokenId) -> Result<(Vec<Vec<TokenId>>, PackStats)>
where
    I: IntoIterator<Item = T>,
    T: AsRef<[TokenId]>,
{
    let mut packer = SequencePacker::new(seq_len, eod_id)?;
    let mut out = Vec::new();
    for doc in docs {
        packer
            .push(doc.as_ref(), |s| {
                out.push(s.to_vec());
                Ok::<_, std::convert::Infallible>(())
            })
            .unwrap_or_else(|e| match e {});
    }
    Ok((out, packer.finish()))
}
