use cyattract::arith::ArithError;
use cyattract::attractor::AttractorError;
use cyattract::boundary::BoundaryError;
use cyattract::hyperseries::SeriesError;
use cyattract::k3e::K3eError;
use cyattract::monodromy::MonodromyError;
use cyattract::periods::PeriodsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Monodromy(#[from] MonodromyError),
    #[error(transparent)]
    Periods(#[from] PeriodsError),
    #[error(transparent)]
    Attractor(#[from] AttractorError),
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
    #[error(transparent)]
    K3e(#[from] K3eError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("{0} self-test check(s) failed")]
    SelfTest(usize),
}

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Series(_) => "series",
            CliError::Monodromy(_) => "monodromy",
            CliError::Periods(_) => "periods",
            CliError::Attractor(_) => "attractor",
            CliError::Boundary(_) => "boundary",
            CliError::K3e(_) => "k3e",
            CliError::Arith(_) => "arith",
            CliError::SelfTest(_) => "selftest",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Config(_) => 3,
            CliError::Io(_) => 4,
            CliError::Series(_) => 10,
            CliError::Monodromy(_) => 11,
            CliError::Periods(_) => 12,
            CliError::Attractor(_) => 13,
            CliError::Boundary(_) => 14,
            CliError::K3e(_) => 15,
            CliError::Arith(_) => 16,
            CliError::SelfTest(_) => 20,
        }
    }
}
