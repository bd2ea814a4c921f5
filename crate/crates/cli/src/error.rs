use selfsim_core::schreier::SchreierError;
use selfsim_core::structure::StructureError;
use selfsim_core::{AutomatonError, ExprError, GroupError};
use selfsim_spectral::{EigenError, OperatorError, SpectralError};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Schreier(#[from] SchreierError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl From<OperatorError> for CliError {
    fn from(e: OperatorError) -> Self {
        CliError::Spectral(e.into())
    }
}

impl From<EigenError> for CliError {
    fn from(e: EigenError) -> Self {
        CliError::Spectral(e.into())
    }
}

fn schreier_code(e: &SchreierError) -> i32 {
    match e {
        SchreierError::Group(_) | SchreierError::LevelCap { .. } => EXIT_CAP,
        SchreierError::Import { .. } | SchreierError::Format(_) | SchreierError::Csv(_) => EXIT_USAGE,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Group(_) | CliError::Structure(_) => EXIT_CAP,
            CliError::Schreier(e) => schreier_code(e),
            CliError::Spectral(e) => match e {
                SpectralError::Eigen(EigenError::NoConvergence { .. }) => EXIT_CAP,
                SpectralError::Operator(OperatorError::LevelCap { .. }) => EXIT_CAP,
                SpectralError::Operator(OperatorError::Schreier(s)) => schreier_code(s),
                _ => EXIT_USAGE,
            },
            CliError::Usage(_) | CliError::Automaton(_) | CliError::Expr(_) | CliError::Io { .. } => EXIT_USAGE,
        }
    }
}
