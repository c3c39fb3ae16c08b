use std::path::PathBuf;

use thiserror::Error;

/// Errors produced across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("format error at byte {offset}: {message}")]
    Format { offset: usize, message: String },

    #[error("unsupported dataset version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("tree parse error at position {position}: {message}")]
    TreeParse { position: usize, message: String },

    #[error("alignment error: token #{index} {token:?} not found at sentence offset {offset}")]
    Alignment {
        token: String,
        index: usize,
        offset: usize,
    },

    #[error("span ({start}, {end}) out of range for text of length {len}")]
    Span { start: usize, end: usize, len: usize },

    #[error("backend {endpoint} failed: {message}")]
    Backend { endpoint: String, message: String },

    #[error("backend {endpoint} rejected request with status {status}: {message}")]
    Protocol {
        endpoint: String,
        status: u16,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("task {0} not found")]
    NotFound(String),

    #[error("conflict: {0}")]
    Conflict(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of an external model backend (transport, timeout, bad status).
    pub fn is_backend(&self) -> bool {
        matches!(self, Error::Backend { .. } | Error::Protocol { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
