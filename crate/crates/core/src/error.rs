use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("signal: {0}")]
    InvalidSignal(String),

    #[error("model: invalid parameters: {0}")]
    InvalidParams(String),

    #[error("estimator: invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("estimator: smoothing length must be at least 1 (got {0})")]
    InvalidLength(usize),

    #[error("estimator: window [{start}, {end}] exceeds signal of length {len}")]
    OutOfRange {
        start: isize,
        end: isize,
        len: usize,
    },

    #[error("estimator: no anchors selected; widen the cost threshold or reduce the scale")]
    NoAnchors,

    #[error("estimator: anchors must be strictly increasing and within [0, {len}), offending index {index}")]
    InvalidAnchors { index: usize, len: usize },

    #[error("comparators: singular system: {0}")]
    SingularSystem(String),

    #[error("evaluation: length mismatch ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("evaluation: no sample is wet under both thresholds; distances undefined")]
    NoWetPhase,

    #[error("io: file not found: {0}")]
    MissingFile(PathBuf),

    #[error("io: malformed row at line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },

    #[error("io: non-uniform sampling at line {line}: step {step} vs period {period}")]
    NonUniformSampling { line: u64, step: f64, period: f64 },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("io: csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: json: {0}")]
    Json(#[from] serde_json::Error),
}
