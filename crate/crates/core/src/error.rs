use thiserror::Error;

/// Errors produced by graph construction, generation and fitting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid blockmodel spec: {0}")]
    InvalidSpec(String),

    #[error("infeasible perturbation: need {needed} positions, only {available} available")]
    Infeasible { needed: usize, available: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown {what}: {name:?}")]
    Unknown { what: &'static str, name: String },

    #[error("edge calibration failed: {0}")]
    Calibration(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
