use thiserror::Error;

/// Errors raised by the geometry, sampling, transport and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point is outside the open domain of {0}")]
    Domain(&'static str),

    #[error("dual-gradient root find did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("half step failed its stationarity certificate (residual {0:e})")]
    Stationarity(f64),

    #[error("weights must be strictly positive, got {0}")]
    Weight(f64),

    #[error("relative convexity alpha must be positive, got {0}")]
    Alpha(f64),

    #[error("{0} is empty")]
    Empty(&'static str),

    #[error("cost matrix must be square, got {rows}x{cols}")]
    Shape { rows: usize, cols: usize },

    #[error("measures have different sizes: {0} vs {1}")]
    Size(usize, usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("rejection sampler exhausted its budget of {0} proposals")]
    Budget(usize),

    #[error("chain failed at step {step}: {source}")]
    Chain {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Convergence { .. } | Error::Stationarity(_) | Error::Budget(_) => true,
            Error::Chain { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
