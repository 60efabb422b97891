use std::path::PathBuf;

use ndarray::Array2;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read or write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("corpus {0} contains no non-empty lines")]
    EmptyCorpus(String),

    #[error("invalid document boundaries: {0}")]
    DocBounds(String),

    #[error("segmentation policy error: {0}")]
    Policy(String),

    #[error("no token reaches min_count={min_count}")]
    EmptyVocabulary { min_count: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("row for token {0:?} has zero norm")]
    ZeroRow(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("embedding rows are not unit-normalized")]
    NotNormalized,

    #[error("no dictionary pair is covered by both vocabularies")]
    EmptyDictionary,

    #[error("dictionary induction produced no mutual nearest neighbours")]
    EmptyInducedDictionary,

    #[error("adversarial training diverged at step {step}")]
    Diverged {
        step: usize,
        last_finite: Box<Array2<f64>>,
    },

    #[error("no token of the corpus is in the vocabulary")]
    NoTrainableToken,

    #[error("no gold source word could be evaluated ({oov} out of vocabulary)")]
    NoEvaluable { oov: usize },

    #[error("document {0} is empty")]
    EmptyDocument(usize),

    #[error("rank {rank} outside 1..={max}")]
    Rank { rank: usize, max: usize },

    #[error("every similarity pair is out of vocabulary")]
    AllOov,

    #[error("cipher token {0:?} collides with a source token")]
    CipherCollision(String),

    #[error("domain {0} received no lines")]
    EmptyDomain(usize),

    #[error("every grid configuration failed")]
    AllConfigsFailed,

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
