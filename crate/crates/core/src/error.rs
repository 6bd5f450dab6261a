use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid nonlinearity: {0}")]
    InvalidSpec(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("no positive zero of g found on the scanned range")]
    NoZeroFound,

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("did not converge: {0}")]
    NonConvergent(String),

    #[error("integration step underflow at r = {radius}")]
    StepUnderflow { radius: f64 },

    #[error("solution overflow at r = {radius}")]
    Overflow { radius: f64 },

    #[error("no overshoot/undershoot bracket for mu = {mu} (heights up to {height_max})")]
    NoBracket { mu: f64, height_max: f64 },

    #[error("every frequency sample failed")]
    EmptyCurve,

    #[error("no normalized solution with mass {mass}")]
    NoSolution { mass: f64 },

    #[error("insufficient samples: need {needed}, have {have}")]
    InsufficientSamples { needed: usize, have: usize },

    #[error("scaling oracle requires a pure power nonlinearity")]
    WrongFamily,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
