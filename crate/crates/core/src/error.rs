//! Error type shared by every module.

/// All failure modes surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {detail}")]
    ShapeMismatch { op: &'static str, detail: String },

    #[error("precision mismatch: {0}")]
    PrecisionMismatch(String),

    #[error("invalid dimension in {op}: {detail}")]
    InvalidDimension { op: &'static str, detail: String },

    #[error("ScalingDegenerate: |{name}| = {value:e} is below 1e-6; reversible backward would divide by it")]
    ScalingDegenerate { name: &'static str, value: f64 },

    #[error("non-finite value produced by {op}")]
    NonFinite { op: &'static str },

    #[error("token id {id} out of range for vocabulary of size {vocab}")]
    TokenOutOfRange { id: u32, vocab: usize },

    #[error("sequence length {len} exceeds maximum {max}")]
    SequenceTooLong { len: usize, max: usize },

    #[error("invalid segment plan: {0}")]
    InvalidPlan(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed data: {0}")]
    Malformed(String),

    #[error("unknown parameter '{0}'")]
    UnknownParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn shape(op: &'static str, detail: impl Into<String>) -> Self {
        Error::ShapeMismatch { op, detail: detail.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
