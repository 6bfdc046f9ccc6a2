use std::io;

use thiserror::Error;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<gravidec::Error> for CliError {
    fn from(err: gravidec::Error) -> Self {
        use gravidec::Error as E;
        match err {
            E::QuadratureNotConverged { .. }
            | E::SeriesNotConverged { .. }
            | E::StepSizeUnderflow { .. }
            | E::EnergyMismatch { .. } => CliError::Numerical(err.to_string()),
            E::InvalidParameter { .. }
            | E::UnknownUnit(_)
            | E::UnknownScenario(_)
            | E::ZeroFrequencyDivergence
            | E::CutoffRequired
            | E::InvalidDensityMatrix(_)
            | E::GridCoverage(_) => CliError::Usage(err.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Io(io::Error::other(err))
    }
}

pub type CliResult<T> = Result<T, CliError>;
