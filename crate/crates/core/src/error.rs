//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by lattice builders, Hamiltonian assembly, simulation and
/// the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    Lattice(String),

    #[error("invalid Hamiltonian: {0}")]
    Hamiltonian(String),

    #[error("invalid circuit: {0}")]
    Circuit(String),

    #[error("invalid state: {0}")]
    State(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("sampling error: {0}")]
    Sampling(String),

    /// Post-selection discarded every shot in the record.
    #[error("post-selection discarded all {0} shots")]
    EmptyRecord(u64),

    #[error("compression error: {0}")]
    Compression(String),

    /// Configuration diagnostics always name the offending field.
    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
