use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input is empty after tokenization")]
    EmptyInput,

    #[error("tokenize error at byte {offset}: {message}")]
    Tokenize { offset: usize, message: String },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid fold count {k} for {examples} examples")]
    InvalidFoldCount { k: usize, examples: usize },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index {index} out of range for length {len}")]
    Index { index: usize, len: usize },

    #[error("numerical failure: {0}")]
    Numerics(String),

    #[error("operation requires the {expected} variant")]
    Variant { expected: &'static str },

    #[error("keyword map names `{english}` for `{target}`, but it has no source vector")]
    Keyword { target: String, english: String },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
