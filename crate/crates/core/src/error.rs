use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension {dim} exceeds the limit {limit}")]
    DimensionGuard { dim: usize, limit: usize },

    #[error("density matrix violates `{what}` (value {value:e})")]
    InvalidDensity { what: &'static str, value: f64 },

    #[error("non-finite state at t = {time}")]
    NonFinite { time: f64 },

    #[error("negative curvature {curvature:e}: no local oscillator picture")]
    NegativeCurvature { curvature: f64 },

    #[error("Fock truncation too small: {reason}")]
    Truncation { reason: String },

    #[error("quadrature did not converge: {0}")]
    Convergence(String),

    #[error("wave packet reached the grid boundary (edge probability {edge_mass:e} at t = {time})")]
    BoundaryContact { edge_mass: f64, time: f64 },

    #[error("norm drift {drift:e} exceeds {limit:e}")]
    NormDrift { drift: f64, limit: f64 },

    #[error("no decoherence: {0}")]
    NoDecoherence(&'static str),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
