use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config or preconditions.
    #[error("{0}")]
    Usage(String),

    /// The run itself went wrong (solver failure, uncertified state).
    #[error("{0}")]
    Failed(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] inls_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use inls_core::Error as E;
        match self {
            CliError::Failed(_) => 1,
            CliError::Core(E::NotConverged { .. } | E::TrivialAttractor | E::CutoffBound(_)) => 1,
            CliError::Usage(_) | CliError::Io { .. } | CliError::Core(_) => 2,
        }
    }
}
