use std::io;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("empty corpus: {0}")]
    EmptyCorpus(String),

    #[error("target vocabulary size {0} is below the 256 byte tokens")]
    VocabTooSmall(usize),

    #[error("min_pair_frequency must be at least 1")]
    InvalidMinFrequency,

    #[error("token id {id} is out of range for a vocabulary of {vocab_size}")]
    IdOutOfRange { id: u32, vocab_size: usize },

    #[error("invalid tokenizer: {0}")]
    InvalidTokenizer(String),

    #[error("corpus misaligned: {left} has {left_len} lines, {right} has {right_len}")]
    Misaligned {
        left: String,
        left_len: usize,
        right: String,
        right_len: usize,
    },

    #[error("language `{0}` is not present in the corpus")]
    MissingLanguage(String),

    #[error("invalid sampling input: {0}")]
    InvalidSampling(String),

    #[error("no shard for language `{0}`")]
    MissingShard(String),

    #[error("direction policy has no rule for origin `{0}`")]
    UncoveredOrigin(String),

    #[error("invalid record: {0}")]
    InvalidRecord(String),

    #[error("malformed prompt template: {0}")]
    Template(String),

    #[error("invalid language pair `{0}` (expected `src-tgt`)")]
    InvalidPair(String),

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
