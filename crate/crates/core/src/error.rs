use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("block index {index} out of range (truncation {truncation})")]
    BlockOutOfRange { index: usize, truncation: usize },

    #[error("invalid spectrum at block {index}: {reason}")]
    InvalidSpectrum { index: usize, reason: String },

    #[error("spectrum mismatch: {0}")]
    SpectrumMismatch(String),

    #[error("shape mismatch at block {index}: expected {expected}, found {found}")]
    ShapeMismatch {
        index: usize,
        expected: String,
        found: String,
    },

    #[error("non-finite entry at block {0}")]
    NonFinite(usize),

    #[error("block {0} is not normal")]
    NonNormal(usize),

    #[error("blocks of operators {left} and {right} do not commute at block {index}")]
    NonCommuting {
        index: usize,
        left: usize,
        right: usize,
    },

    #[error("insufficient samples: need {needed}, found {found}")]
    InsufficientSamples { needed: usize, found: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no decaying subsequence: {0}")]
    NoDecayingSubsequence(String),

    #[error("invalid recipe: {0}")]
    InvalidRecipe(String),

    #[error("cannot parse coefficient {input:?}: {reason}")]
    Coefficient { input: String, reason: String },

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
