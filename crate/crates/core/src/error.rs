use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("rho is not a root of P")]
    NotARoot,
    #[error("rho is a repeated root of P")]
    RootMultiplicity,
    #[error("polynomial degree: {0}")]
    Degree(String),
    #[error("N is too small for the requested range")]
    NTooSmall,
    #[error("estimated work {needed:.3e} exceeds budget {budget:.3e}")]
    WorkBudget { needed: f64, budget: f64 },
    #[error("theta grid is too coarse for the major arcs")]
    GridResolution,
    #[error("directions do not generate Z^2")]
    NotABasis,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("integer overflow while evaluating a polynomial")]
    Overflow,
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::Argument(_) => "argument",
            Error::NotARoot => "not-a-root",
            Error::RootMultiplicity => "root-multiplicity",
            Error::Degree(_) => "degree",
            Error::NTooSmall => "N-too-small",
            Error::WorkBudget { .. } => "work-budget",
            Error::GridResolution => "grid-resolution",
            Error::NotABasis => "not-a-basis",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Overflow => "overflow",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
