//! Error type shared across the crate.
//!
//! Every error carries a stable machine-readable `code()` used by the CLI
//! when emitting JSON error lines, plus an `exit_code()` in the convention
//! 0 ok / 2 usage / 3 data / 4 numeric / 5 capacity.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("sample index {0} out of range")]
    IndexOutOfRange(usize),

    #[error("empty batch: at least one sample index is required")]
    EmptyBatch,

    #[error("strong convexity unavailable: the L2 coefficient must be positive")]
    StrongConvexityUnavailable,

    #[error("metric unsupported for {0} loss")]
    UnsupportedMetric(&'static str),

    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("invalid data: {0}")]
    Data(String),

    #[error("dataset fingerprint mismatch: log records {expected}, supplied dataset is {got}")]
    FingerprintMismatch { expected: String, got: String },

    #[error("degenerate batch at step {step}: every member of the batch is unlearned")]
    DegenerateBatch { step: usize },

    #[error("numeric failure at step {step}: {msg}")]
    NumericFailure { step: usize, msg: String },

    #[error("curvature condition violated for pair {pair}: dg'dw = {value:e}")]
    CurvatureViolation { pair: usize, value: f64 },

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("contraction violated: r = {r} >= 1")]
    ContractionViolated { r: f64 },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable identifier for machine-readable error output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::IndexOutOfRange(_) => "index-out-of-range",
            Error::EmptyBatch => "empty-batch",
            Error::StrongConvexityUnavailable => "strong-convexity-unavailable",
            Error::UnsupportedMetric(_) => "unsupported-metric",
            Error::Parse { .. } => "parse",
            Error::Data(_) => "data",
            Error::FingerprintMismatch { .. } => "fingerprint-mismatch",
            Error::DegenerateBatch { .. } => "degenerate-batch",
            Error::NumericFailure { .. } => "numeric-failure",
            Error::CurvatureViolation { .. } => "curvature-violation",
            Error::Factorization(_) => "factorization",
            Error::ContractionViolated { .. } => "contraction-violated",
            Error::Capacity(_) => "capacity",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    /// Process exit code: 0 ok, 2 usage, 3 data, 4 numeric, 5 capacity.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::DimensionMismatch { .. }
            | Error::EmptyBatch
            | Error::StrongConvexityUnavailable
            | Error::UnsupportedMetric(_) => 2,
            Error::IndexOutOfRange(_)
            | Error::Parse { .. }
            | Error::Data(_)
            | Error::FingerprintMismatch { .. }
            | Error::Io(_)
            | Error::Json(_) => 3,
            Error::DegenerateBatch { .. }
            | Error::NumericFailure { .. }
            | Error::CurvatureViolation { .. }
            | Error::Factorization(_)
            | Error::ContractionViolated { .. } => 4,
            Error::Capacity(_) => 5,
        }
    }
}
