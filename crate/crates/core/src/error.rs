use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is outside [{lo}, {hi}]")]
    Range { what: &'static str, value: u64, lo: u64, hi: u64 },

    #[error("invalid distribution: {0}")]
    Validation(String),

    #[error("total mass {total} deviates from 1 by more than {tol:e}")]
    Normalization { total: f64, tol: f64 },

    #[error("adaptive quadrature did not converge on [{lo}, {hi}]")]
    Quadrature { lo: f64, hi: f64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("{what}: {size} qubits exceeds the cap of {cap}")]
    Resource { what: &'static str, size: usize, cap: usize },

    #[error("stage {stage}: ladder deviates from the multiplexor by {deviation:e} (tolerance {tol:e})")]
    Compilation { stage: usize, deviation: f64, tol: f64 },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Export(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
