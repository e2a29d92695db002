//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty prediction set: need at least one sample and one augmentation")]
    EmptyData,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite value at {0}")]
    NonFinite(String),

    #[error("dimension mismatch: expected {expected} weights, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("weights must sum to 1 within 1e-12 (sum = {0})")]
    WeightSum(f64),

    #[error("negative weight {value} at index {index} not allowed for {provenance} weights")]
    NegativeWeight {
        index: usize,
        value: f64,
        provenance: &'static str,
    },

    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),

    #[error("gamma matrix is numerically singular: {0}")]
    SingularGamma(String),

    #[error("active-set solver failed to converge: {0}")]
    NonConvergence(String),

    #[error("index {index} out of range for {len} augmentations")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("pruning requires at least two augmentations (m = {0})")]
    TooFewAugmentations(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("input file is empty")]
    EmptyFile,

    #[error("missing column: {0}")]
    MissingColumn(String),

    #[error("ragged rows: {0}")]
    RaggedRows(String),

    #[error("non-numeric cell at {0}")]
    NonNumericCell(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 for input problems, 2 for numerical
    /// failures. Verification failures exit 3 but are not `Error`s.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SingularGamma(_) | Error::NonConvergence(_) => 2,
            _ => 1,
        }
    }
}
