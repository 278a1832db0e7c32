use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("shape error: expected length {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("non-finite entries in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid truncation: dimension {trunc_dim} cannot hold a {k}-photon resonance")]
    InvalidTruncation { k: u32, trunc_dim: usize },

    #[error("index ({n}, {m}) out of range for dimension {dim}")]
    OutOfRange { n: usize, m: usize, dim: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular linear system")]
    Singular,

    #[error("steady state is not unique: second-smallest singular value {0:.3e}")]
    DegenerateNullSpace(f64),

    #[error("solver did not converge (residual {residual:.3e})")]
    NotConverged { residual: f64 },

    #[error("integration step underflow (h = {0:.3e})")]
    StepUnderflow(f64),

    #[error("state is not a steady state of the supplied Liouvillian (residual {0:.3e})")]
    StaleSteadyState(f64),

    #[error("covariance has not decayed inside the tau window (|cov(tau_max)| = {tail:.3e}, |cov(0)| = {head:.3e})")]
    WindowTooShort { tail: f64, head: f64 },
}
