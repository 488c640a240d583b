//! Error classes and their exit codes.

use krein::kernels::KernelError;
use krein::matrix_oracle::OracleError;
use krein::nevanlinna::NevanlinnaError;
use krein::quad::{QuadError, QuadValue};
use krein::spectral_traces::TraceError;

use crate::config::ConfigError;
use crate::grid::GridError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AppError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("io: {0}")]
    Io(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) | AppError::Io(_) => 1,
            AppError::Domain(_) => 2,
            AppError::Convergence(_) => 3,
        }
    }
}

impl From<GridError> for AppError {
    fn from(e: GridError) -> Self {
        AppError::Usage(e.to_string())
    }
}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        AppError::Usage(e.to_string())
    }
}

impl From<NevanlinnaError> for AppError {
    fn from(e: NevanlinnaError) -> Self {
        AppError::Domain(e.to_string())
    }
}

impl<V: QuadValue> From<QuadError<V>> for AppError {
    fn from(e: QuadError<V>) -> Self {
        match e {
            QuadError::Invalid(_) => AppError::Domain(e.to_string()),
            _ => AppError::Convergence(e.to_string()),
        }
    }
}

impl From<KernelError> for AppError {
    fn from(e: KernelError) -> Self {
        match e {
            KernelError::Quadrature(q) => q.into(),
            KernelError::ComplexQuadrature(q) => q.into(),
            KernelError::Nevanlinna(n) => n.into(),
            KernelError::Domain(_) | KernelError::Pole(_) => AppError::Domain(e.to_string()),
        }
    }
}

impl From<TraceError> for AppError {
    fn from(e: TraceError) -> Self {
        match e {
            TraceError::Quadrature(q) => q.into(),
            TraceError::Kernel(k) => k.into(),
            TraceError::Fit(_) => AppError::Convergence(e.to_string()),
            _ => AppError::Domain(e.to_string()),
        }
    }
}

impl From<OracleError> for AppError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Bracket { .. } => AppError::Convergence(e.to_string()),
            _ => AppError::Domain(e.to_string()),
        }
    }
}
