use std::path::PathBuf;

use crate::geom::ArcSegment;

/// Errors raised across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two rasters that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The arc boundary of a hull could not be stitched into closed chains.
    #[error("failed to close boundary chain after {} arc(s): {reason}", fragment.len())]
    ChainClosure {
        reason: String,
        fragment: Vec<ArcSegment>,
    },

    /// Malformed input file.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// A computed quantity failed a sanity check (non-finite or out of range).
    #[error("numeric diagnostic: {0}")]
    Numeric(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
