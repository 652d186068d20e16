use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Argument outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid physical parameter.
    #[error("invalid parameter `{name}`: {reason}")]
    Param { name: &'static str, reason: String },

    /// Adaptive quadrature gave up before reaching the requested tolerance.
    #[error("quadrature did not reach tolerance {tolerance:e} within {evaluations} evaluations (error estimate {estimate:e})")]
    Tolerance {
        tolerance: f64,
        estimate: f64,
        evaluations: usize,
    },

    #[error("grid error: {0}")]
    Grid(String),

    /// Integration step is too large or lost trace/norm.
    #[error("step error: {0}")]
    Step(String),

    /// A per-member jump probability left its admissible range.
    #[error("probability error: {0}")]
    Probability(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("at t = {t}: {source}")]
    AtTime { t: f64, source: Box<Error> },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Param {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn at(self, t: f64) -> Self {
        Error::AtTime {
            t,
            source: Box::new(self),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Param { .. } | Error::Config(_) => 2,
            Error::AtTime { source, .. } => source.exit_code(),
            _ => 3,
        }
    }
}
