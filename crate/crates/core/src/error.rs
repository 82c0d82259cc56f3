use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("fit error: {0}")]
    Fit(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("numerical consistency error: {0}")]
    Numerical(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
