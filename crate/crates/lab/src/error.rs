//! Error type of the driver and its mapping to exit codes.

use std::process::ExitCode;

/// Failures of a command.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    /// Bad configuration or arguments.
    #[error("usage: {0}")]
    Usage(String),
    /// Numerical failure inside a stage.
    #[error("stage `{stage}` failed: {source}")]
    Numerical {
        /// Stage name.
        stage: &'static str,
        /// Underlying error.
        source: sil_core::Error,
    },
    /// Filesystem failure.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    /// CSV encoding failure.
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl LabError {
    /// Exit code: 2 for usage, 3 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Usage(_) => 2,
            _ => 3,
        }
    }
}

/// Tags a core error with its stage.
pub fn at(stage: &'static str) -> impl Fn(sil_core::Error) -> LabError {
    move |source| LabError::Numerical { stage, source }
}

/// Result alias.
pub type LabResult<T> = Result<T, LabError>;

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// All checks passed (or nothing to check).
    Ok,
    /// Outputs were already current; nothing was done.
    UpToDate,
    /// At least one threshold failed.
    Failed,
}

impl Outcome {
    /// Process exit code.
    pub fn exit_code(self) -> ExitCode {
        match self {
            Outcome::Ok | Outcome::UpToDate => ExitCode::from(0),
            Outcome::Failed => ExitCode::from(1),
        }
    }

    /// `Failed` unless `pass`.
    pub fn from_pass(pass: bool) -> Self {
        if pass { Outcome::Ok } else { Outcome::Failed }
    }
}
