use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("gamma function pole at z = {0}")]
    GammaPole(f64),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("{func} failed to converge: {detail}")]
    Convergence { func: &'static str, detail: String },

    #[error("guard violated: {0}")]
    Guard(String),

    #[error("no sign change of {what} on [{lo}, {hi}]")]
    NoSignChange { what: &'static str, lo: f64, hi: f64 },

    #[error("shell matching failed: {0}")]
    Matching(String),

    #[error("integrator: {0}")]
    Integrator(String),

    #[error("phase fit is ill-conditioned: {0}")]
    FitConditioning(String),

    #[error("state {index}: {source}")]
    Seed {
        index: i64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    pub(crate) fn convergence(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Convergence {
            func,
            detail: detail.into(),
        }
    }

    /// Name of the module the error originated from, used by the CLI report.
    pub fn module(&self) -> &'static str {
        match self {
            Error::Domain { .. } | Error::GammaPole(_) | Error::Convergence { .. } => "specfun",
            Error::Parameter(_) | Error::Guard(_) | Error::Matching(_) => "potential",
            Error::NoSignChange { .. } => "roots",
            Error::Integrator(_) | Error::FitConditioning(_) => "oracle",
            Error::Seed { .. } => "boundstates",
        }
    }
}
