use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate map: {0}")]
    Degenerate(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{what}: residual {residual:e} exceeds tolerance {tol:e}")]
    Tolerance { what: &'static str, residual: f64, tol: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
