use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the numerical pipeline and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} index {index} out of range (bound {bound})")]
    Range { what: String, index: usize, bound: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("no gap in marginal similarity vector: all entries equal")]
    NoGap,

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn range(what: impl Into<String>, index: usize, bound: usize) -> Self {
        Error::Range {
            what: what.into(),
            index,
            bound,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable short tag used in per-mode failure reports and CSV status columns.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Range { .. } => "range",
            Error::Argument(_) => "argument",
            Error::Format { .. } => "format",
            Error::Validation(_) => "validation",
            Error::Convergence { .. } => "convergence",
            Error::Degenerate(_) => "degenerate",
            Error::NoGap => "no-gap",
            Error::Io { .. } => "io",
            Error::Json { .. } => "json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
