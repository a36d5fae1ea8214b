use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed caller input: bad node ids, empty grids, missing sets.
    #[error("invalid input: {0}")]
    Input(String),

    /// A numeric parameter outside its domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("no convergence after {iterations} iterations (last max change {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end: 2 for
    /// out-of-domain parameters, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::Singular(_) | Error::Convergence { .. } => 2,
            _ => 1,
        }
    }
}
