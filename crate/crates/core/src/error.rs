use std::io;

use thiserror::Error;

/// Errors produced by the encoders, solvers and file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty vocabulary: no n-grams could be extracted from the corpus")]
    EmptyVocabulary,

    #[error("empty n-gram set for input {input:?}{}", row.map(|r| format!(" at row {r}")).unwrap_or_default())]
    EmptyGramSet { input: String, row: Option<usize> },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("numeric failure at iteration {iteration}: {detail}")]
    Numeric { iteration: usize, detail: String },

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("model is not fitted")]
    NotFitted,

    #[error("malformed {what} at line {line}: {detail}")]
    Format {
        what: &'static str,
        line: usize,
        detail: String,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short stable identifier, used for machine-parsable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::EmptyVocabulary => "empty-vocabulary",
            Error::EmptyGramSet { .. } => "empty-gram-set",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::Numeric { .. } => "numeric",
            Error::Evaluation(_) => "evaluation",
            Error::NotFitted => "not-fitted",
            Error::Format { .. } => "format",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
