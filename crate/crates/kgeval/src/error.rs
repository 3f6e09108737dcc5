//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed caller input (empty triplet fields, oversized text, ...).
    #[error("invalid input: {0}")]
    InputValidation(String),

    /// A data-structure invariant was violated.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// Bad configuration value or unusable config file.
    #[error("configuration error: {0}")]
    Config(String),

    /// A node id was not found in the graph.
    #[error("unknown node: {0}")]
    UnknownNode(String),

    /// A provider returned something outside its contract
    /// (missing similarity pair, wrong embedding count, ...).
    #[error("provider contract violation: {0}")]
    ProviderContract(String),

    /// Transport-level provider failure after retries were exhausted.
    #[error("provider request failed after {attempts} attempt(s): {message}")]
    Provider { message: String, attempts: u32 },

    /// Extraction output that could not be parsed, even after one repair
    /// round trip. Carries the raw response for audit.
    #[error("extraction output unparseable: {message}")]
    ExtractionFormat { message: String, raw: String },

    /// Cache storage problem (distinct from a plain miss).
    #[error("cache error: {0}")]
    Cache(String),

    /// Dataset-level failure (too many malformed lines, no usable records).
    #[error("data error: {0}")]
    Data(String),

    /// An oracle refused an input above its size cap.
    #[error("oracle refused: {0}")]
    OracleRefusal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 usage/config, 2 data, 3 provider.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InputValidation(_) => 1,
            Error::Provider { .. } | Error::ProviderContract(_) | Error::ExtractionFormat { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
