use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = AltError> = std::result::Result<T, E>;

/// Coarse error category, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Io,
    Numerical,
}

#[derive(Debug, Error)]
pub enum AltError {
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("instance {instance}: {msg}")]
    Instance { instance: usize, msg: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("malformed model file: {0}")]
    Model(String),

    #[error("unsupported model version {found} (expected {expected})")]
    UnsupportedVersion { found: u32, expected: u32 },

    #[error("feature file: {0}")]
    Features(String),

    #[error("eigensolver did not converge after {sweeps} sweeps on {dim}x{dim} matrix {matrix:?}")]
    NoConvergence {
        sweeps: usize,
        dim: usize,
        matrix: Vec<f64>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl AltError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            AltError::Io { .. } => ErrorKind::Io,
            AltError::NoConvergence { .. } => ErrorKind::Numerical,
            _ => ErrorKind::Validation,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AltError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: &str, line: usize, msg: impl Into<String>) -> Self {
        AltError::Parse {
            path: path.to_string(),
            line,
            msg: msg.into(),
        }
    }
}
