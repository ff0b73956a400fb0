use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, StcaError>;

/// Malformed-file conditions reported by the binary readers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormatErrorKind {
    BadMagic,
    Truncated,
    DimensionMismatch,
    Invalid,
}

impl FormatErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FormatErrorKind::BadMagic => "bad-magic",
            FormatErrorKind::Truncated => "truncated-file",
            FormatErrorKind::DimensionMismatch => "dimension-mismatch",
            FormatErrorKind::Invalid => "invalid",
        }
    }
}

#[derive(Debug, Error)]
pub enum StcaError {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("singular system (condition estimate {condition:.3e} exceeds {threshold:.1e})")]
    Singular { condition: f64, threshold: f64 },

    #[error("divergence: {0}")]
    Divergence(String),

    #[error("{} at byte offset {offset}: {detail}", kind.as_str())]
    Format {
        kind: FormatErrorKind,
        offset: u64,
        detail: String,
    },

    #[error("configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl StcaError {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        StcaError::Shape(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        StcaError::InvalidParam(msg.into())
    }

    pub(crate) fn format(kind: FormatErrorKind, offset: u64, detail: impl Into<String>) -> Self {
        StcaError::Format {
            kind,
            offset,
            detail: detail.into(),
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        StcaError::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        StcaError::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable machine-readable category, printed by the CLI on failure.
    pub fn category(&self) -> &'static str {
        match self {
            StcaError::Shape(_) => "shape",
            StcaError::InvalidParam(_) => "param",
            StcaError::Singular { .. } => "singular",
            StcaError::Divergence(_) => "divergence",
            StcaError::Format { kind, .. } => kind.as_str(),
            StcaError::Config(_) => "config",
            StcaError::Io { .. } => "io",
        }
    }
}
