use thiserror::Error;

use crate::expr::ParseError;

/// Failure of a command, carrying its exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Expr(#[from] ParseError),

    #[error(transparent)]
    Core(#[from] tresca_core::Error),

    #[error("{0}")]
    NotConverged(String),

    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    /// 1 usage, 2 data or mesh, 3 solver did not deliver.
    pub fn exit_code(&self) -> u8 {
        use tresca_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Expr(_) => 1,
            CliError::Core(e) => match e {
                E::Mesh(_) | E::Label(_) | E::Parse { .. } | E::Io { .. } | E::Assembly(_) | E::Input(_) => 2,
                E::NotConverged { .. } | E::Cycle { .. } | E::Step(_) | E::FluxResidual { .. } => 3,
            },
            CliError::NotConverged(_) | CliError::CheckFailed(_) => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
