use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid algebra shape: {0}")]
    InvalidShape(String),

    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: String, right: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite values in {0}")]
    NonFinite(String),

    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("Jacobi iteration did not converge in {sweeps} sweeps (residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("operator is not a projection (defect {defect:e})")]
    NotAProjection { defect: f64 },

    #[error("operator is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("kernel failed certification: {0}")]
    Uncertified(String),

    #[error("kernel built from a raw superoperator has no serializable recipe")]
    RawKernel,

    #[error("Orlicz function: {0}")]
    Orlicz(String),

    #[error("infeasible budget at step `{step}`: {detail}")]
    InfeasibleBudget { step: String, detail: String },

    #[error("audit mismatch for `{item}`: recorded {recorded:e}, recomputed {recomputed:e}")]
    AuditMismatch { item: String, recorded: f64, recomputed: f64 },

    #[error("config error:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn mismatch(left: impl std::fmt::Display, right: impl std::fmt::Display) -> Self {
        Error::ShapeMismatch { left: left.to_string(), right: right.to_string() }
    }
}
