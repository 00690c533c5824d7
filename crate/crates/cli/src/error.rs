use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config line {line}, column {column}: {message}")]
    Config { line: usize, column: usize, message: String },
    #[error("config is missing required key '{0}'")]
    MissingKey(&'static str),
    #[error("scheme incompatible with non-periodic boundary: {0}")]
    SchemeIncompatible(String),
    #[error("{0}")]
    Usage(String),
    #[error("invariant breach: {0}")]
    Invariant(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Core(#[from] fuzzmech_core::Error),
}

impl CliError {
    /// 1 for a breach detected while running, 2 for anything wrong with the request.
    pub fn exit_code(&self) -> i32 {
        use fuzzmech_core::Error as E;
        match self {
            CliError::Invariant(_) => 1,
            CliError::Core(
                E::NormDrift { .. }
                | E::NodeFormed { .. }
                | E::NonFinite { .. }
                | E::SolverDiverged(_)
                | E::LoopTouchesNode { .. }
                | E::UnderResolvedWinding { .. },
            ) => 1,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
