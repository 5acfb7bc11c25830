use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{what} has size {size}, cap is {cap}")]
    SizeCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("budget of {budget} exhausted: {what}")]
    Budget { what: String, budget: u64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("matrix is not symmetric (max deviation {0:e})")]
    NotSymmetric(f64),

    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    #[error("model {model} cannot be used here: {reason}")]
    Model { model: String, reason: String },

    #[error("base eigenvalue {value} has no cover eigenvalue within {tol:e} (nearest at distance {dist:e})")]
    SpectrumMismatch { value: f64, dist: f64, tol: f64 },

    #[error("ill-conditioned design: {0}")]
    IllConditioned(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
