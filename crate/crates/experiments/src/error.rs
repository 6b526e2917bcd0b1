use std::path::PathBuf;

use mapc_core::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("invalid sweep spec: {0}")]
    InvalidSpec(String),
    #[error("a plot needs at least two sweep points; use the CSV output instead")]
    DegeneratePlot,
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl ExperimentError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 bad or infeasible input, 2 size refusal, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io { .. } => 3,
            Self::Model(ModelError::SizeLimit(_)) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = ExperimentError> = std::result::Result<T, E>;
