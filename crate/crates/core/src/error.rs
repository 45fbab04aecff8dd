use std::path::PathBuf;

use thiserror::Error;

use crate::estimate::FitResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or input lies outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("series too short: need at least {needed} observations, got {got}")]
    Length { needed: usize, got: usize },

    #[error("non-positive value {value} at {at}")]
    NonPositive { at: String, value: f64 },

    /// Not enough history for a rolling window or lag filter.
    #[error("insufficient history: first valid index is {first_valid}")]
    Window { first_valid: usize },

    #[error("unknown month {0}")]
    Lookup(String),

    #[error("macro series does not cover month {0}")]
    Coverage(String),

    #[error("length mismatch: {left} vs {right}")]
    Mismatch { left: usize, right: usize },

    #[error("zero variance in series `{0}`")]
    ZeroVariance(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("non-finite value at day {day}: {what}")]
    Numeric { day: usize, what: String },

    #[error("series not aligned: {0}")]
    Alignment(String),

    #[error("explosive simulation at step {step} (sigma2 = {sigma2:e})")]
    Explosive { step: usize, sigma2: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("optimizer failed to converge after {restarts} restarts")]
    NonConvergence { restarts: usize, best: Box<FitResult> },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for errors caused by the filesystem or malformed input files.
    pub fn is_input(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Csv(_) | Error::Parse { .. } | Error::Json(_))
    }
}
