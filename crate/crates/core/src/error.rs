use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    MissingFile(PathBuf),

    #[error("malformed RIFF/WAV data: {0}")]
    MalformedWav(String),

    #[error("unsupported WAV encoding: {0}")]
    UnsupportedCodec(String),

    #[error("empty clip")]
    EmptyClip,

    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("input too short: need at least {needed} samples/columns, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("silent input: {0}")]
    Silent(&'static str),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("pattern id not found: {0}")]
    MissingPattern(String),

    #[error("duplicate pattern id: {0}")]
    DuplicateId(String),

    #[error("manifest row {row}: {message}")]
    Manifest { row: usize, message: String },

    #[error("score file row {row}: {message}")]
    ScoreFile { row: usize, message: String },

    #[error("image: {0}")]
    Image(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{count} file(s) failed; first: {first}")]
    Batch { count: usize, first: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
