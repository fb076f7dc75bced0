use std::path::PathBuf;

use thiserror::Error;

/// Invalid parameters or scenario configuration.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("missing field `{0}`")]
    MissingField(String),
    #[error("unknown builtin scenario `{0}`")]
    UnknownBuiltin(String),
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
}

impl ConfigError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

/// Errors raised by the lattice layer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("relation parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("relation has an empty {kind} at index {index}")]
    EmptyLine { kind: &'static str, index: usize },
    #[error("relation has {rows} rows; exhaustive enumeration supports at most {max} (decompose into blocks)")]
    Capacity { rows: usize, max: usize },
    #[error("lattice has {elements} elements; law checks support at most {max}")]
    TooLarge { elements: usize, max: usize },
    #[error("subset is not an element of the lattice: {0}")]
    NotAnElement(String),
    #[error("generator configuration error: {0}")]
    Generator(String),
}

/// Errors raised by the analysis layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("series too short: {len} samples, need at least {min}")]
    TooShort { len: usize, min: usize },
    #[error("fit band [{lo}, {hi}] contains {bins} bins, need at least {min}")]
    SparseBand {
        lo: f64,
        hi: f64,
        bins: usize,
        min: usize,
    },
}

/// Top-level error for scenario execution.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("state audit failed: {}", .0.join("; "))]
    Audit(Vec<String>),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
