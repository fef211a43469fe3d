use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("empty trace file: {0}")]
    EmptyFile(PathBuf),

    #[error("non-finite gain at line {line} (sample index {index})")]
    NonFinite { line: u64, index: usize },

    #[error("irregular timestamp at line {line}: {message}")]
    Timestamp { line: u64, message: String },

    #[error("invalid manifest: {0}")]
    Manifest(String),

    #[error("invalid link: {0}")]
    InvalidLink(String),

    #[error("all samples are missing")]
    AllMissing,

    #[error("degenerate series: zero variance")]
    DegenerateSeries,

    #[error("degenerate window: zero standard deviation")]
    DegenerateWindow,

    #[error("insufficient decay range: {retained} lags at or above threshold {threshold}, need at least {required}")]
    InsufficientDecayRange {
        retained: usize,
        threshold: f64,
        required: usize,
    },

    #[error("insufficient spans: {found} valid spans, need at least {required}")]
    InsufficientSpans { found: usize, required: usize },

    #[error("invalid synthesis spec: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    Argument(String),
}

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
