use thiserror::Error;

/// Errors raised by the divisibility toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not Hermitian: entry ({row}, {col}) deviates by {deviation:e}")]
    NotHermitian { row: usize, col: usize, deviation: f64 },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("unsupported dimension: expected {expected}, found {found}")]
    UnsupportedDimension { expected: usize, found: usize },

    #[error("generator is not trace preserving: block trace defect {defect:e}")]
    NotTracePreserving { defect: f64 },

    #[error(
        "process map is singular at t = {time} (condition number {condition:e}); \
         non-invertible points need separate treatment"
    )]
    SingularProcess { time: f64, condition: f64 },

    #[error("generator is not in the Pauli class: off-class entry of size {deviation:e}")]
    NotInPauliClass { deviation: f64 },

    #[error("internal consistency violated: {0}")]
    InternalConsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
