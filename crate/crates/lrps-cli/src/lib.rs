//! Benchmark harness for low-rank plus sparse recovery: synthetic instance
//! generation, experiment orchestration with common random numbers, robust
//! PCA on complete data, matrix file I/O, and the `lrps` command-line tool.

pub mod bench;
pub mod instance;
pub mod io;
pub mod persist;
pub mod rpca;

use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] lrps_core::CoreError),

    #[error(transparent)]
    Ops(#[from] lrps_ops::OpsError),

    #[error(transparent)]
    Solver(#[from] lrps_solvers::SolverError),

    #[error(transparent)]
    Analysis(#[from] lrps_analysis::AnalysisError),
}

impl CliError {
    pub fn argument(message: impl Into<String>) -> Self {
        Self::Argument(message.into())
    }

    pub fn parse(location: &str, message: &str) -> Self {
        Self::Parse {
            location: location.to_string(),
            message: message.to_string(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn with_path(self, path: &Path) -> Self {
        match self {
            Self::Parse { location, message } => Self::Parse {
                location: format!("{}: {location}", path.display()),
                message,
            },
            other => other,
        }
    }

    /// Process exit code: 2 for argument/parse problems, 3 for solver
    /// failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Argument(_) | Self::Parse { .. } => 2,
            Self::Solver(lrps_solvers::SolverError::NumericalFailure { .. }) => 3,
            Self::Solver(lrps_solvers::SolverError::InvalidProblem(_)) => 2,
            Self::Core(_) | Self::Ops(_) | Self::Analysis(_) => 2,
            _ => 1,
        }
    }
}
