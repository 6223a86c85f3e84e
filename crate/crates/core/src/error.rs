use thiserror::Error;

/// Errors produced by the readout-model library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: expected {expected} entries, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    EigenNoConvergence { sweeps: usize, off_norm: f64 },

    #[error("channel is not trace preserving: defect {defect:e} exceeds {tol:e}")]
    NotTracePreserving { defect: f64, tol: f64 },

    #[error("POVM axiom `{axiom}` violated: defect {defect:e} exceeds {tol:e}")]
    PovmAxiom {
        axiom: &'static str,
        defect: f64,
        tol: f64,
    },

    #[error("state is not physical: {0}")]
    NotPhysical(String),

    #[error("readout model invariant violated: {0}")]
    InvalidModel(String),

    #[error("matrix is singular (pivot {pivot:e})")]
    Singular { pivot: f64 },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
