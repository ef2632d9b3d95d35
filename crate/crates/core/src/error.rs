use thiserror::Error;

/// Errors raised by every public operation in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated the operation's precondition.
    #[error("{op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// A computation produced a non-finite value.
    #[error("{op}: result out of range ({detail})")]
    Range { op: &'static str, detail: String },

    /// A required input (usually a delta record) is missing.
    #[error("missing dependency: {0}")]
    Dependency(String),

    /// A delta cache file could not be parsed.
    #[error("cache line {line}: {detail}")]
    CacheFormat { line: usize, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn range(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Range {
            op,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
