use std::io;
use std::path::PathBuf;

/// Process exit status of the `pcband` binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    /// `verify` finished, but some comparison exceeded its threshold.
    ThresholdExceeded = 1,
    Config = 2,
    Numeric = 3,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] pcband_core::Error),
    #[error("cannot read profile '{}': {source}", path.display())]
    ReadProfile { path: PathBuf, source: io::Error },
    #[error("invalid profile JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot write '{}': {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("{oracle} oracle failed: {source}")]
    Oracle { oracle: &'static str, source: pcband_core::Error },
    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Core(e) if !e.is_config_error() => ExitCode::Numeric,
            // a failed oracle precondition is a verification failure, not bad input
            CliError::Oracle { .. } => ExitCode::Numeric,
            _ => ExitCode::Config,
        }
    }
}
