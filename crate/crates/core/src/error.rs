use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{what} {index} out of range [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        index: usize,
        lo: usize,
        hi: usize,
    },
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn range(what: &'static str, index: usize, lo: usize, hi: usize) -> Self {
        Error::OutOfRange { what, index, lo, hi }
    }
}

/// Failures while decoding a serialized index container.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum LoadError {
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported version {0}")]
    UnsupportedVersion(u16),
    #[error("truncated data while reading {0}")]
    Truncated(&'static str),
    #[error("checksum mismatch in section {0}")]
    ChecksumMismatch(String),
    #[error("missing section {0}")]
    MissingSection(String),
    #[error("malformed data: {0}")]
    Malformed(String),
}
