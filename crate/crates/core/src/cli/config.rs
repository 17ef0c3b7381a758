//! Pipeline config file: one JSON document. Every field is optional and
//! every value can be overridden by the matching command-line flag.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bpe::Normalization;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub english: Option<String>,
    pub languages: Vec<String>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub paths: PathsConfig,
    pub vocab: VocabConfig,
    pub sampling: SamplingConfig,
    pub finetune: FinetuneConfig,
    /// Echoed verbatim by `emit-training-profile` when present.
    pub training_profile: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    /// Monolingual text per language (vocabulary extension input).
    pub monolingual: BTreeMap<String, PathBuf>,
    /// Pre-training shards per language (text or binary token shards).
    pub shards: BTreeMap<String, PathBuf>,
    pub tokenizers: BTreeMap<String, PathBuf>,
    pub tokenizer: Option<PathBuf>,
    pub base_tokenizer: Option<PathBuf>,
    pub extension_tokenizer: Option<PathBuf>,
    pub efficiency_corpus: Option<PathBuf>,
    pub counts: Option<PathBuf>,
    pub plan: Option<PathBuf>,
    pub flores: Vec<PathBuf>,
    pub ntrex: Option<PathBuf>,
    pub wmt: Vec<WmtSource>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WmtSource {
    pub pair: String,
    pub src: PathBuf,
    pub tgt: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VocabConfig {
    pub size: Option<usize>,
    pub min_pair_frequency: Option<u64>,
    pub normalization: Option<Normalization>,
    pub extension_languages: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    pub temperature: Option<f64>,
    pub english_share: Option<f64>,
    pub seq_len: Option<usize>,
    pub total_docs: Option<usize>,
    pub eod_id: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FinetuneConfig {
    pub pairs: Option<Vec<String>>,
    pub max_source_length: Option<usize>,
    pub max_target_length: Option<usize>,
    pub bidirectional_exceptions: Option<Vec<String>>,
    pub prompt_template: Option<String>,
    pub completion_template: Option<String>,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> crate::Result<Self> {
        let text = crate::io::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| crate::Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    /// Language codes must be unique.
    pub fn validate(&self) -> Result<(), String> {
        let mut seen = std::collections::BTreeSet::new();
        for l in &self.languages {
            if !seen.insert(l) {
                return Err(format!("language `{l}` is listed twice in the config"));
            }
        }
        Ok(())
    }
}
