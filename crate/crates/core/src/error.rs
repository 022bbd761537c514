use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("insufficient length: need at least {needed} observations, got {got}")]
    InsufficientLength { needed: usize, got: usize },

    #[error("singular design matrix")]
    SingularDesign,

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("deterministic specification {det} is not available for {test}")]
    UnsupportedDetSpec { test: String, det: String },

    #[error("degenerate labels: {0}")]
    DegenerateLabels(String),

    #[error("empty node: all class counts are zero")]
    EmptyNode,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the CLI: 2 config, 3 data, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_) | Error::InvalidSpec(_) | Error::UnsupportedDetSpec { .. } => 2,
            Error::SingularDesign | Error::Numerical(_) | Error::EmptyNode => 4,
            Error::InsufficientLength { .. }
            | Error::DegenerateSeries(_)
            | Error::DegenerateLabels(_)
            | Error::LengthMismatch { .. }
            | Error::Schema(_)
            | Error::EmptyInput(_)
            | Error::Parse { .. }
            | Error::Io { .. }
            | Error::Json(_) => 3,
        }
    }
}
