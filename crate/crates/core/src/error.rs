use std::path::PathBuf;

/// Errors produced by the codec, the metrics and the file readers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input at byte offset {offset}: {reason}")]
    MalformedInput { offset: usize, reason: String },

    #[error("malformed stream at byte offset {offset}: {reason}")]
    MalformedStream { offset: usize, reason: String },

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },

    #[error("unsupported stream version {0}")]
    UnsupportedVersion(u8),

    #[error("truncated stream: needed {needed} more bytes for {what}")]
    Truncated { what: &'static str, needed: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn stream(offset: usize, reason: impl Into<String>) -> Self {
        Error::MalformedStream {
            offset,
            reason: reason.into(),
        }
    }
}
