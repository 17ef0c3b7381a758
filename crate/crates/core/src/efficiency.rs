//! Tokenizer efficiency as the length ratio between non-English text and its
//! aligned English counterpart, computed over whole corpora rather than
//! averaged per sentence.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bpe::{pre_split, Tokenizer};
use crate::io::read_lines;
use crate::{Error, Execution, Result};

/// An English-centric multi-parallel corpus: every translation list is
/// aligned line-by-line with `english`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiParallelCorpus {
    english_code: String,
    english: Vec<String>,
    translations: BTreeMap<String, Vec<String>>,
}

impl MultiParallelCorpus {
    pub fn new(english_code: impl Into<String>, english: Vec<String>, translations: BTreeMap<String, Vec<String>>) -> Result<Self> {
        let english_code = english_code.into();
        if translations.is_empty() {
            return Err(Error::EmptyCorpus("multi-parallel corpus has no translations".into()));
        }
        if english.is_empty() {
            return Err(Error::EmptyCorpus("multi-parallel corpus has no sentences".into()));
        }
        if translations.contains_key(&english_code) {
            return Err(Error::Format(format!("`{english_code}` is both the English side and a translation")));
        }
        for (lang, lines) in &translations {
            if lines.len() != english.len() {
                return Err(Error::Misaligned {
                    left: english_code.clone(),
                    left_len: english.len(),
                    right: lang.clone(),
                    right_len: lines.len(),
                });
            }
        }
        Ok(MultiParallelCorpus {
            english_code,
            english,
            translations,
        })
    }

    /// Loads one file per language from `dir`. The language code is the
    /// file name up to its first `.` (`de.devtest`, `de.txt`, ...).
    pub fn load_dir(dir: &Path, english_code: &str) -> Result<Self> {
        let mut files: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut paths = Vec::new();
        for entry in entries {
            let path = entry.map_err(|e| Error::io(dir, e))?.path();
            if path.is_file() {
                paths.push(path);
            }
        }
        paths.sort();
        for path in paths {
            let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
            if name.starts_with('.') {
                continue;
            }
            let lang = name.split('.').next().unwrap_or(name).to_string();
            let lines = read_lines(&path)?;
            if files.insert(lang.clone(), lines).is_some() {
                return Err(Error::Format(format!("{}: more than one file for language `{lang}`", dir.display())));
            }
        }
        let english = files
            .remove(english_code)
            .ok_or_else(|| Error::MissingLanguage(english_code.to_string()))?;
        Self::new(english_code, english, files)
    }

    /// Appends another split (e.g. devtest followed by test). Both must cover
    /// the same languages.
    pub fn concat(mut self, other: MultiParallelCorpus) -> Result<Self> {
        if self.english_code != other.english_code || self.languages().ne(other.languages()) {
            return Err(Error::Format("corpus splits cover different languages".into()));
        }
        self.english.extend(other.english);
        for (lang, lines) in other.translations {
            self.translations.get_mut(&lang).expect("same languages").extend(lines);
        }
        Ok(self)
    }

    pub fn english_code(&self) -> &str {
        &self.english_code
    }

    pub fn english(&self) -> &[String] {
        &self.english
    }

    pub fn len(&self) -> usize {
        self.english.len()
    }

    pub fn is_empty(&self) -> bool {
        self.english.is_empty()
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.translations.keys().map(String::as_str)
    }

    /// Sentences for `lang`, which may also be the English code.
    pub fn sentences(&self, lang: &str) -> Option<&[String]> {
        if lang == self.english_code {
            Some(&self.english)
        } else {
            self.translations.get(lang).map(Vec::as_slice)
        }
    }
}

/// How a corpus is turned into one token count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConcatMode {
    /// Join sentences with `\n` and encode the result once.
    #[default]
    Newline,
    /// Sum per-sentence token counts; no separator tokens.
    JoinFree,
}

pub fn corpus_token_count<S: AsRef<str> + Sync>(t: &Tokenizer, sentences: &[S], mode: ConcatMode, execution: Execution) -> usize {
    match mode {
        ConcatMode::JoinFree => execution.map(sentences, |s| t.count_tokens(s.as_ref())).into_iter().sum(),
        ConcatMode::Newline => {
            let joined = sentences.iter().map(AsRef::as_ref).collect::<Vec<_>>().join("\n");
            // encoding is independent per pre-split piece, so chunks of
            // pieces can be counted separately
            let pieces: Vec<&str> = pre_split(&joined).collect();
            let chunks: Vec<&[&str]> = pieces.chunks(1024).collect();
            execution
                .map(&chunks, |chunk| chunk.iter().map(|p| t.count_tokens(p)).sum::<usize>())
                .into_iter()
                .sum()
        }
    }
}

/// Token count of `x` over token count of `y` (the English side).
pub fn length_ratio<S: AsRef<str> + Sync>(t: &Tokenizer, x: &[S], y: &[S], mode: ConcatMode) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyCorpus("length ratio needs non-empty corpora".into()));
    }
    if x.len() != y.len() {
        return Err(Error::Misaligned {
            left: "x".into(),
            left_len: x.len(),
            right: "y".into(),
            right_len: y.len(),
        });
    }
    let exec = Execution::default();
    let num = corpus_token_count(t, x, mode, exec);
    let den = corpus_token_count(t, y, mode, exec);
    if den == 0 {
        return Err(Error::EmptyCorpus("English side encodes to zero tokens".into()));
    }
    Ok(num as f64 / den as f64)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AnalyzeOptions {
    pub mode: ConcatMode,
    pub execution: Execution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub tokenizer: String,
    pub language: String,
    pub length_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub corpus_id: String,
    pub english_token_count: BTreeMap<String, usize>,
    /// (tokenizer name, language) -> ratio
    #[serde(with = "entry_list")]
    pub entries: BTreeMap<(String, String), f64>,
}

mod entry_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<(String, String), f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        let list: Vec<ReportEntry> = m
            .iter()
            .map(|((t, l), r)| ReportEntry {
                tokenizer: t.clone(),
                language: l.clone(),
                length_ratio: *r,
            })
            .collect();
        list.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<(String, String), f64>, D::Error> {
        let list = Vec::<ReportEntry>::deserialize(d)?;
        Ok(list.into_iter().map(|e| ((e.tokenizer, e.language), e.length_ratio)).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Computes the length ratio of every (tokenizer, language) combination.
/// Each tokenizer's English token count is computed once and shared.
pub fn analyze(
    tokenizers: &BTreeMap<String, Tokenizer>,
    corpus: &MultiParallelCorpus,
    corpus_id: &str,
    opts: AnalyzeOptions,
) -> Result<EfficiencyReport> {
    if tokenizers.is_empty() {
        return Err(Error::Format("analysis needs at least one tokenizer".into()));
    }
    let names: Vec<&String> = tokenizers.keys().collect();
    // the per-sentence loop inside corpus_token_count is sequential so the
    // parallelism lives at one level only
    let english: Vec<usize> = opts
        .execution
        .map(&names, |n| corpus_token_count(&tokenizers[*n], corpus.english(), opts.mode, Execution::Sequential));
    for (name, &count) in names.iter().zip(&english) {
        if count == 0 {
            return Err(Error::EmptyCorpus(format!("English side encodes to zero tokens under `{name}`")));
        }
    }

    let tasks: Vec<(usize, &str)> = (0..names.len())
        .flat_map(|ti| corpus.languages().map(move |l| (ti, l)))
        .collect();
    let counts = opts.execution.map(&tasks, |&(ti, lang)| {
        let sentences = corpus.sentences(lang).expect("language listed by corpus");
        corpus_token_count(&tokenizers[names[ti]], sentences, opts.mode, Execution::Sequential)
    });

    let entries = tasks
        .iter()
        .zip(counts)
        .map(|(&(ti, lang), n)| ((names[ti].clone(), lang.to_string()), n as f64 / english[ti] as f64))
        .collect();
    Ok(EfficiencyReport {
        corpus_id: corpus_id.to_string(),
        english_token_count: names.iter().map(|n| n.to_string()).zip(english).collect(),
        entries,
    })
}

pub const CSV_HEADER: &str = "tokenizer,language,length_ratio";

impl EfficiencyReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for ((t, l), r) in &self.entries {
            writeln!(out, "{},{},{:.6}", csv_field(t), csv_field(l), r).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn emit(&self, format: ReportFormat) -> Vec<u8> {
        match format {
            ReportFormat::Csv => self.to_csv().into_bytes(),
            ReportFormat::Json => self.to_json().into_bytes(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Fixed-width table: one row per language, one column per tokenizer.
    pub fn to_table(&self) -> String {
        let names: Vec<&str> = self.english_token_count.keys().map(String::as_str).collect();
        let mut langs: Vec<&str> = self.entries.keys().map(|(_, l)| l.as_str()).collect();
        langs.sort_unstable();
        langs.dedup();
        let width = names.iter().map(|n| n.len()).max().unwrap_or(0).max(10);
        let mut out = format!("{:<10}", "language");
        for n in &names {
            write!(out, " {n:>width$}").unwrap();
        }
        out.push('\n');
        for l in langs {
            write!(out, "{l:<10}").unwrap();
            for n in &names {
                match self.entries.get(&(n.to_string(), l.to_string())) {
                    Some(r) => write!(out, " {r:>width$.6}").unwrap(),
                    None => write!(out, " {:>width$}", "-").unwrap(),
                }
            }
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Parses the CSV form back into (tokenizer, language) -> ratio.
pub fn parse_csv(text: &str) -> Result<BTreeMap<(String, String), f64>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(CSV_HEADER) => {}
        other => return Err(Error::Format(format!("unexpected CSV header {other:?}"))),
    }
    let mut out = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let fields = split_csv_line(line);
        let [t, l, r] = fields.as_slice() else {
            return Err(Error::Format(format!("CSV line {}: expected 3 fields", i + 2)));
        };
        let r: f64 = r
            .parse()
            .map_err(|e| Error::Format(format!("CSV line {}: {e}", i + 2)))?;
        out.insert((t.clone(), l.clone()), r);
    }
    Ok(out)
}

fn split_csv_line(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match (c, quoted) {
            ('"', true) if chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            ('"', _) => quoted = !quoted,
            (',', false) => fields.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    fields.push(cur);
    fields
}
