use std::path::PathBuf;

use eplab::{ErrorFamily, LabError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config line {line}: {message}")]
    ConfigLine { line: usize, message: String },
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error("no convergence within {iterations} iterations (last update {last_update:e})")]
    NotConverged { iterations: usize, last_update: f64 },
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigLine { .. } | CliError::Config(_) => 2,
            CliError::Io { .. } | CliError::Csv(_) => 3,
            CliError::NotConverged { .. } => 6,
            CliError::Lab(e) => lab_code(e),
        }
    }
}

fn lab_code(e: &LabError) -> i32 {
    match e {
        LabError::Precondition(_) => 8,
        LabError::Inadmissible { source, .. } => lab_code(source),
        e => match e.family() {
            ErrorFamily::Input => 2,
            ErrorFamily::Admissibility => 4,
            ErrorFamily::Sonic => 5,
            ErrorFamily::Divergence => 6,
            ErrorFamily::Solver => 7,
        },
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
