use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the operation's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Momentum-space operation requested on a non-periodic grid.
    #[error("operation `{0}` requires a periodic grid")]
    UnsupportedBoundary(&'static str),

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// The grid cannot resolve the requested kernel width.
    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("inconsistent non-commutativity parameters: {0}")]
    InconsistentParameters(String),

    /// Periodic Poisson source with nonzero integral.
    #[error("periodic Poisson source is incompatible: integral {integral:e} exceeds {tolerance:e}")]
    Compatibility { integral: f64, tolerance: f64 },

    #[error("{solver} did not converge after {iterations} iterations (residual {residual:e})")]
    Iteration {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("configuration error: {0}")]
    Configuration(String),

    /// Every problem found while validating a scenario file.
    #[error("invalid scenario config:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by the user's input rather than by the numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Configuration(_)
                | Error::Validation(_)
                | Error::Parse(_)
                | Error::Domain(_)
                | Error::Resolution(_)
                | Error::InconsistentParameters(_)
                | Error::Shape(_)
                | Error::UnsupportedBoundary(_)
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::UnsupportedBoundary(_) => "unsupported-boundary",
            Error::Shape(_) => "shape",
            Error::Resolution(_) => "resolution",
            Error::InconsistentParameters(_) => "inconsistent-parameters",
            Error::Compatibility { .. } => "compatibility",
            Error::Iteration { .. } => "iteration",
            Error::Configuration(_) => "configuration",
            Error::Validation(_) => "validation",
            Error::Numerical(_) => "numerical",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}
