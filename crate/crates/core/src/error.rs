use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{function}: argument outside domain ({detail})")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("{function}: no convergence after {iterations} terms (last term {last_term:e}, partial sum {partial_sum:e})")]
    NonConvergence {
        function: &'static str,
        iterations: usize,
        last_term: f64,
        partial_sum: f64,
    },

    #[error("quadrature failed on [{lower:e}, {upper:e}]: {reason} (estimate {estimate:e}, error {abs_error:e})")]
    Quadrature {
        lower: f64,
        upper: f64,
        estimate: f64,
        abs_error: f64,
        reason: &'static str,
    },

    #[error("no solution: {what} (target {target:e}, limiting value {limit:e})")]
    NoSolution {
        what: &'static str,
        target: f64,
        limit: f64,
    },

    #[error("solver did not meet the residual bound: {what} (residual {residual:e} after {iterations} iterations)")]
    Residual {
        what: &'static str,
        residual: f64,
        iterations: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }
}
