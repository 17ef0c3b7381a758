//! Fine-tuning set construction from multi-parallel (FLoRes-style),
//! English-centric (NTREX-style) and past-WMT parallel data.
//!
//! Records from each source pass through a [`DirectionPolicy`] that decides
//! which translation directions they contribute; duplicates are removed,
//! per-direction statistics are collected, and surviving records are
//! rendered into prompt/completion pairs subject to token limits.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bpe::Tokenizer;
use crate::efficiency::MultiParallelCorpus;
use crate::io::read_lines;
use crate::{Error, Execution, Result};

pub const DEFAULT_MAX_SOURCE_TOKENS: usize = 512;
pub const DEFAULT_MAX_TARGET_TOKENS: usize = 512;

/// The eleven evaluated directions plus en-fr.
pub const DEFAULT_PAIRS: [&str; 12] = [
    "cs-uk", "en-cs", "en-de", "en-es", "en-hi", "en-is", "en-ja", "en-ru", "en-uk", "en-zh", "ja-zh", "en-fr",
];

pub const DEFAULT_PROMPT_TEMPLATE: &str = "Translate this from {src_name} to {tgt_name}:\n{src_name}: {src_text}\n{tgt_name}:";
pub const DEFAULT_COMPLETION_TEMPLATE: &str = " {tgt_text}";

/// Where a record came from. Policies are keyed by origin.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Origin {
    Flores,
    Ntrex,
    Wmt,
    Other(String),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Flores => "flores",
            Origin::Ntrex => "ntrex",
            Origin::Wmt => "wmt",
            Origin::Other(s) => s,
        })
    }
}

impl FromStr for Origin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "" => return Err(Error::InvalidRecord("record has no origin tag".into())),
            "flores" => Origin::Flores,
            "ntrex" => Origin::Ntrex,
            "wmt" => Origin::Wmt,
            other => Origin::Other(other.to_string()),
        })
    }
}

impl From<Origin> for String {
    fn from(o: Origin) -> String {
        o.to_string()
    }
}

impl TryFrom<String> for Origin {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// A translation direction, written `src-tgt`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LanguagePair {
    pub src: String,
    pub tgt: String,
}

impl LanguagePair {
    pub fn new(src: impl Into<String>, tgt: impl Into<String>) -> Self {
        LanguagePair {
            src: src.into(),
            tgt: tgt.into(),
        }
    }

    pub fn reversed(&self) -> Self {
        LanguagePair::new(self.tgt.clone(), self.src.clone())
    }

    /// Direction-free key: the two codes in sorted order.
    pub fn unordered(&self) -> (String, String) {
        if self.src <= self.tgt {
            (self.src.clone(), self.tgt.clone())
        } else {
            (self.tgt.clone(), self.src.clone())
        }
    }

    pub fn default_pairs() -> Vec<LanguagePair> {
        DEFAULT_PAIRS.iter().map(|p| p.parse().expect("valid default pair")).collect()
    }
}

impl fmt::Display for LanguagePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.src, self.tgt)
    }
}

impl FromStr for LanguagePair {
    type Err = Error;

    /// Splits on the first `-`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().split_once('-') {
            Some((a, b)) if !a.is_empty() && !b.is_empty() && a != b => Ok(LanguagePair::new(a, b)),
            _ => Err(Error::InvalidPair(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParallelRecord {
    pub src_lang: String,
    pub tgt_lang: String,
    pub src_text: String,
    pub tgt_text: String,
    pub origin: Origin,
}

impl ParallelRecord {
    /// Trims both texts. Fails on identical languages or an empty side.
    pub fn new(src_lang: &str, tgt_lang: &str, src_text: &str, tgt_text: &str, origin: Origin) -> Result<Self> {
        if src_lang == tgt_lang {
            return Err(Error::InvalidRecord(format!("source and target language are both `{src_lang}`")));
        }
        let (src_text, tgt_text) = (src_text.trim(), tgt_text.trim());
        if src_text.is_empty() || tgt_text.is_empty() {
            return Err(Error::InvalidRecord("empty text after trimming".into()));
        }
        Ok(ParallelRecord {
            src_lang: src_lang.to_string(),
            tgt_lang: tgt_lang.to_string(),
            src_text: src_text.to_string(),
            tgt_text: tgt_text.to_string(),
            origin,
        })
    }

    pub fn pair(&self) -> LanguagePair {
        LanguagePair::new(self.src_lang.clone(), self.tgt_lang.clone())
    }

    pub fn reversed(&self) -> Self {
        ParallelRecord {
            src_lang: self.tgt_lang.clone(),
            tgt_lang: self.src_lang.clone(),
            src_text: self.tgt_text.clone(),
            tgt_text: self.src_text.clone(),
            origin: self.origin.clone(),
        }
    }

    fn dedup_key(&self) -> (&str, &str, &str, &str) {
        (&self.src_lang, &self.tgt_lang, &self.src_text, &self.tgt_text)
    }
}

fn push_if_valid(out: &mut Vec<ParallelRecord>, src: &str, tgt: &str, s: &str, t: &str, origin: &Origin) -> bool {
    match ParallelRecord::new(src, tgt, s, t, origin.clone()) {
        Ok(r) => {
            out.push(r);
            true
        }
        Err(_) => false,
    }
}

/// Both directions of every configured pair for every aligned index.
/// Pairs may join two non-English languages. Lines empty on either side are
/// skipped.
pub fn ingest_multiparallel(corpus: &MultiParallelCorpus, pairs: &[LanguagePair]) -> Result<Vec<ParallelRecord>> {
    let columns: Vec<(&LanguagePair, &[String], &[String])> = pairs
        .iter()
        .map(|p| {
            let col = |l: &str| corpus.sentences(l).ok_or_else(|| Error::MissingLanguage(l.to_string()));
            Ok((p, col(&p.src)?, col(&p.tgt)?))
        })
        .collect::<Result<_>>()?;
    let origin = Origin::Flores;
    let mut out = Vec::with_capacity(corpus.len() * pairs.len() * 2);
    let mut skipped = 0;
    for i in 0..corpus.len() {
        for (p, src, tgt) in &columns {
            if push_if_valid(&mut out, &p.src, &p.tgt, &src[i], &tgt[i], &origin) {
                push_if_valid(&mut out, &p.tgt, &p.src, &tgt[i], &src[i], &origin);
            } else {
                skipped += 1;
            }
        }
    }
    if skipped > 0 {
        log::warn!("multi-parallel ingestion skipped {skipped} empty segment pairs");
    }
    Ok(out)
}

/// One record per aligned line in the `src → tgt` direction.
pub fn ingest_lines<S: AsRef<str>>(src_lines: &[S], tgt_lines: &[S], src: &str, tgt: &str, origin: Origin) -> Result<Vec<ParallelRecord>> {
    if src_lines.len() != tgt_lines.len() {
        return Err(Error::Misaligned {
            left: src.to_string(),
            left_len: src_lines.len(),
            right: tgt.to_string(),
            right_len: tgt_lines.len(),
        });
    }
    if src == tgt {
        return Err(Error::InvalidRecord(format!("source and target language are both `{src}`")));
    }
    let mut out = Vec::with_capacity(src_lines.len());
    for (s, t) in src_lines.iter().zip(tgt_lines) {
        push_if_valid(&mut out, src, tgt, s.as_ref(), t.as_ref(), &origin);
    }
    if out.len() < src_lines.len() {
        log::warn!("{src}-{tgt} ({origin}): skipped {} empty segment pairs", src_lines.len() - out.len());
    }
    Ok(out)
}

/// Reads a line-aligned file pair.
pub fn ingest_directional(src_path: &Path, tgt_path: &Path, src: &str, tgt: &str, origin: Origin) -> Result<Vec<ParallelRecord>> {
    let s = read_lines(src_path)?;
    let t = read_lines(tgt_path)?;
    ingest_lines(&s, &t, src, tgt, origin).map_err(|e| match e {
        Error::Misaligned { left_len, right_len, .. } => Error::Misaligned {
            left: src_path.display().to_string(),
            left_len,
            right: tgt_path.display().to_string(),
            right_len,
        },
        e => e,
    })
}

/// English → XX records for every configured pair with an English side,
/// taken from an English-centric corpus (NTREX-style file layout).
pub fn ingest_english_centric(corpus: &MultiParallelCorpus, pairs: &[LanguagePair], origin: Origin) -> Result<Vec<ParallelRecord>> {
    let en = corpus.english_code();
    let mut targets = BTreeSet::new();
    for p in pairs {
        if p.src == en {
            targets.insert(p.tgt.as_str());
        } else if p.tgt == en {
            targets.insert(p.src.as_str());
        }
    }
    let mut out = Vec::new();
    for xx in targets {
        let Some(lines) = corpus.sentences(xx) else {
            log::warn!("{origin}: no `{xx}` file, skipping {en}-{xx}");
            continue;
        };
        out.extend(ingest_lines(corpus.english(), lines, en, xx, origin.clone())?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum DirectionRule {
    /// Keep each record and add its reverse.
    Bidirectional,
    /// Keep only records translating out of `source`; pairs listed in
    /// `exceptions` (either order) are treated as bidirectional.
    FromSourceOnly {
        source: String,
        exceptions: BTreeSet<(String, String)>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionPolicy {
    pub rules: BTreeMap<Origin, DirectionRule>,
}

impl Default for DirectionPolicy {
    fn default() -> Self {
        Self::with_exceptions("en", &[LanguagePair::new("en", "fr")])
    }
}

impl DirectionPolicy {
    /// flores and wmt bidirectional; ntrex restricted to `english → XX`
    /// except for the listed pairs.
    pub fn with_exceptions(english: &str, exceptions: &[LanguagePair]) -> Self {
        let mut rules = BTreeMap::new();
        rules.insert(Origin::Flores, DirectionRule::Bidirectional);
        rules.insert(Origin::Wmt, DirectionRule::Bidirectional);
        rules.insert(
            Origin::Ntrex,
            DirectionRule::FromSourceOnly {
                source: english.to_string(),
                exceptions: exceptions.iter().map(LanguagePair::unordered).collect(),
            },
        );
        DirectionPolicy { rules }
    }
}

/// Expands or restricts directions per origin, then drops exact duplicates
/// on (src_lang, tgt_lang, src_text, tgt_text) keeping the first occurrence.
pub fn apply_policy(records: &[ParallelRecord], policy: &DirectionPolicy) -> Result<Vec<ParallelRecord>> {
    let mut seen: HashSet<(&str, &str, &str, &str)> = HashSet::with_capacity(records.len() * 2);
    let reversed: Vec<Option<ParallelRecord>> = records
        .iter()
        .map(|r| {
            let rule = policy
                .rules
                .get(&r.origin)
                .ok_or_else(|| Error::UncoveredOrigin(r.origin.to_string()))?;
            Ok(match rule {
                DirectionRule::Bidirectional => Some(r.reversed()),
                DirectionRule::FromSourceOnly { exceptions, .. } if exceptions.contains(&r.pair().unordered()) => {
                    Some(r.reversed())
                }
                DirectionRule::FromSourceOnly { .. } => None,
            })
        })
        .collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(records.len() * 2);
    for (r, rev) in records.iter().zip(&reversed) {
        let keep = match &policy.rules[&r.origin] {
            DirectionRule::FromSourceOnly { source, .. } => rev.is_some() || r.src_lang == *source,
            DirectionRule::Bidirectional => true,
        };
        if keep && seen.insert(r.dedup_key()) {
            out.push(r.clone());
        }
        if let Some(rev) = rev {
            if seen.insert(rev.dedup_key()) {
                out.push(rev.clone());
            }
        }
    }
    Ok(out)
}

/// Concatenates sources in the fixed order flores, ntrex, wmt and applies
/// the policy.
pub fn assemble(
    flores: Vec<ParallelRecord>,
    ntrex: Vec<ParallelRecord>,
    wmt: Vec<ParallelRecord>,
    policy: &DirectionPolicy,
) -> Result<Vec<ParallelRecord>> {
    let mut all = flores;
    all.extend(ntrex);
    all.extend(wmt);
    apply_policy(&all, policy)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StatsTable {
    pub counts: BTreeMap<LanguagePair, usize>,
    pub total: usize,
}

pub fn build_stats(records: &[ParallelRecord]) -> StatsTable {
    let mut counts = BTreeMap::new();
    for r in records {
        *counts.entry(r.pair()).or_insert(0) += 1;
    }
    StatsTable {
        counts,
        total: records.len(),
    }
}

#[derive(Serialize, Deserialize)]
struct StatsJson {
    counts: BTreeMap<String, usize>,
    total: usize,
}

impl StatsTable {
    pub fn get(&self, src: &str, tgt: &str) -> usize {
        self.counts.get(&LanguagePair::new(src, tgt)).copied().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        let j = StatsJson {
            counts: self.counts.iter().map(|(p, &n)| (p.to_string(), n)).collect(),
            total: self.total,
        };
        let mut s = serde_json::to_string_pretty(&j).expect("stats serialize");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: StatsJson = serde_json::from_str(s)?;
        let counts = j
            .counts
            .into_iter()
            .map(|(k, v)| Ok((k.parse()?, v)))
            .collect::<Result<_>>()?;
        Ok(StatsTable { counts, total: j.total })
    }

    /// Two-column table: each row shows one direction and its reverse. The
    /// left column holds the direction out of `english` when English is
    /// involved, otherwise the alphabetically first source.
    pub fn to_text(&self, english: &str) -> String {
        let mut rows: BTreeMap<(bool, LanguagePair), LanguagePair> = BTreeMap::new();
        for p in self.counts.keys() {
            let (a, b) = p.unordered();
            let left = if b == english {
                LanguagePair::new(b, a)
            } else {
                LanguagePair::new(a, b)
            };
            let has_en = left.src == english;
            rows.insert((has_en, left.clone()), left.reversed());
        }
        let pair_w = self.counts.keys().map(|p| p.to_string().len()).max().unwrap_or(0).max("Language pair".len());
        let num_w = self.counts.values().map(|n| n.to_string().len()).max().unwrap_or(0).max(4);
        let mut out = format!("{:<pair_w$}  {:>num_w$}  {:<pair_w$}  {:>num_w$}\n", "Language pair", "Num.", "Language pair", "Num.");
        for ((_, left), right) in &rows {
            let n = |p: &LanguagePair| self.counts.get(p).copied().unwrap_or(0);
            writeln!(
                out,
                "{:<pair_w$}  {:>num_w$}  {:<pair_w$}  {:>num_w$}",
                left.to_string(),
                n(left),
                right.to_string(),
                n(right)
            )
            .unwrap();
        }
        writeln!(out, "Total: {}", self.total).unwrap();
        out
    }
}

/// English display name for common language codes; other codes are used
/// verbatim.
pub fn language_name(code: &str) -> &str {
    match code {
        "cs" => "Czech",
        "de" => "German",
        "en" => "English",
        "es" => "Spanish",
        "fr" => "French",
        "hi" => "Hindi",
        "is" => "Icelandic",
        "ja" => "Japanese",
        "ru" => "Russian",
        "uk" => "Ukrainian",
        "zh" => "Chinese",
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Segment {
    Literal(String),
    SrcName,
    TgtName,
    SrcLang,
    TgtLang,
    SrcText,
    TgtText,
}

/// Prompt and completion templates. Placeholders: `{src_name}`,
/// `{tgt_name}`, `{src_lang}`, `{tgt_lang}`, `{src_text}` (prompt only) and
/// `{tgt_text}` (completion only). `{{` and `}}` are literal braces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    prompt: Vec<Segment>,
    completion: Vec<Segment>,
}

impl Default for PromptTemplate {
    fn default() -> Self {
        Self::parse(DEFAULT_PROMPT_TEMPLATE, DEFAULT_COMPLETION_TEMPLATE).expect("default template parses")
    }
}

impl PromptTemplate {
    pub fn parse(prompt: &str, completion: &str) -> Result<Self> {
        let prompt = parse_segments(prompt)?;
        let completion = parse_segments(completion)?;
        for needed in [Segment::SrcName, Segment::TgtName, Segment::SrcText] {
            if !prompt.contains(&needed) {
                return Err(Error::Template(format!("prompt lacks the {} placeholder", placeholder_name(&needed))));
            }
        }
        if prompt.contains(&Segment::TgtText) {
            return Err(Error::Template("prompt must not contain {tgt_text}".into()));
        }
        if !completion.contains(&Segment::TgtText) {
            return Err(Error::Template("completion lacks the {tgt_text} placeholder".into()));
        }
        if completion.contains(&Segment::SrcText) {
            return Err(Error::Template("completion must not contain {src_text}".into()));
        }
        Ok(PromptTemplate { prompt, completion })
    }

    pub fn render(&self, r: &ParallelRecord) -> (String, String) {
        (render(&self.prompt, r), render(&self.completion, r))
    }
}

fn placeholder_name(s: &Segment) -> &'static str {
    match s {
        Segment::SrcName => "{src_name}",
        Segment::TgtName => "{tgt_name}",
        Segment::SrcLang => "{src_lang}",
        Segment::TgtLang => "{tgt_lang}",
        Segment::SrcText => "{src_text}",
        Segment::TgtText => "{tgt_text}",
        Segment::Literal(_) => "literal",
    }
}

fn parse_segments(t: &str) -> Result<Vec<Segment>> {
    let mut out = Vec::new();
    let mut lit = String::new();
    let mut chars = t.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '{' if chars.peek() == Some(&'{') => {
                chars.next();
                lit.push('{');
            }
            '}' if chars.peek() == Some(&'}') => {
                chars.next();
                lit.push('}');
            }
            '}' => return Err(Error::Template(format!("unmatched `}}` in {t:?}"))),
            '{' => {
                let mut name = String::new();
                loop {
                    match chars.next() {
                        Some('}') => break,
                        Some(c) => name.push(c),
                        None => return Err(Error::Template(format!("unclosed `{{` in {t:?}"))),
                    }
                }
                let seg = match name.as_str() {
                    "src_name" => Segment::SrcName,
                    "tgt_name" => Segment::TgtName,
                    "src_lang" => Segment::SrcLang,
                    "tgt_lang" => Segment::TgtLang,
                    "src_text" => Segment::SrcText,
                    "tgt_text" => Segment::TgtText,
                    other => return Err(Error::Template(format!("unknown placeholder {{{other}}}"))),
                };
                if !lit.is_empty() {
                    out.push(Segment::Literal(std::mem::take(&mut lit)));
                }
                out.push(seg);
            }
            c => lit.push(c),
        }
    }
    if !lit.is_empty() {
        out.push(Segment::Literal(lit));
    }
    Ok(out)
}

fn render(segments: &[Segment], r: &ParallelRecord) -> String {
    let mut s = String::new();
    for seg in segments {
        s.push_str(match seg {
            Segment::Literal(l) => l,
            Segment::SrcName => language_name(&r.src_lang),
            Segment::TgtName => language_name(&r.tgt_lang),
            Segment::SrcLang => &r.src_lang,
            Segment::TgtLang => &r.tgt_lang,
            Segment::SrcText => &r.src_text,
            Segment::TgtText => &r.tgt_text,
        });
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinetuneExample {
    pub prompt: String,
    pub completion: String,
    pub src_lang: String,
    pub tgt_lang: String,
    pub origin: Origin,
    /// Tokens in the rendered prompt.
    pub src_token_len: usize,
    /// Tokens in the rendered completion.
    pub tgt_token_len: usize,
    /// Index of the source record in the formatter's input.
    pub record_index: usize,
}

#[derive(Serialize, Deserialize)]
pub struct FinetuneLine {
    pub prompt: String,
    pub completion: String,
    pub src_lang: String,
    pub tgt_lang: String,
    pub origin: Origin,
}

impl FinetuneExample {
    /// One JSON-lines row (no trailing newline).
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&FinetuneLine {
            prompt: self.prompt.clone(),
            completion: self.completion.clone(),
            src_lang: self.src_lang.clone(),
            tgt_lang: self.tgt_lang.clone(),
            origin: self.origin.clone(),
        })
        .expect("example serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    SourceTooLong,
    TargetTooLong,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::SourceTooLong => "source_too_long",
            RejectReason::TargetTooLong => "target_too_long",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionReport {
    pub by_reason: BTreeMap<RejectReason, usize>,
    /// (record index, reason), in input order.
    pub rejected: Vec<(usize, RejectReason)>,
}

impl RejectionReport {
    pub fn count(&self, reason: RejectReason) -> usize {
        self.by_reason.get(&reason).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.rejected.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LengthLimits {
    pub max_source_tokens: usize,
    pub max_target_tokens: usize,
}

impl Default for LengthLimits {
    fn default() -> Self {
        LengthLimits {
            max_source_tokens: DEFAULT_MAX_SOURCE_TOKENS,
            max_target_tokens: DEFAULT_MAX_TARGET_TOKENS,
        }
    }
}

/// Renders records and filters them by token length (limits inclusive).
/// Over-long records are rejected, never truncated; a record over both
/// limits is counted once, as `source_too_long`.
pub fn format_examples(
    records: &[ParallelRecord],
    template: &PromptTemplate,
    tokenizer: &Tokenizer,
    limits: LengthLimits,
    execution: Execution,
) -> (Vec<FinetuneExample>, RejectionReport) {
    let rendered = execution.map(records, |r| {
        let (prompt, completion) = template.render(r);
        let src_len = tokenizer.count_tokens(&prompt);
        let tgt_len = tokenizer.count_tokens(&completion);
        (prompt, completion, src_len, tgt_len)
    });
    let mut examples = Vec::with_capacity(records.len());
    let mut report = RejectionReport::default();
    for (i, (r, (prompt, completion, src_len, tgt_len))) in records.iter().zip(rendered).enumerate() {
        let reason = if src_len > limits.max_source_tokens {
            Some(RejectReason::SourceTooLong)
        } else if tgt_len > limits.max_target_tokens {
            Some(RejectReason::TargetTooLong)
        } else {
            None
        };
        match reason {
            Some(reason) => {
                *report.by_reason.entry(reason).or_insert(0) += 1;
                report.rejected.push((i, reason));
            }
            None => examples.push(FinetuneExample {
                prompt,
                completion,
                src_lang: r.src_lang.clone(),
                tgt_lang: r.tgt_lang.clone(),
                origin: r.origin.clone(),
                src_token_len: src_len,
                tgt_token_len: tgt_len,
                record_index: i,
            }),
        }
    }
    (examples, report)
}
