use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("matrix is not a density matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid mixture weights ({0}, {1}): weights must be non-negative and sum to 1")]
    InvalidWeights(f64, f64),

    #[error("invalid Stokes vector: {0}")]
    InvalidStokes(String),

    #[error("invalid GKLS coefficients at t = {t}: {reason}")]
    InvalidParams { t: f64, reason: String },

    #[error("argument outside the validity domain: {0}")]
    Domain(String),

    #[error("radial coordinate underflowed below 1e-300 at t = {0}")]
    Underflow(f64),

    #[error("radius {r} lies outside the geodesic range [{lo}, {hi}]")]
    OutOfRange { r: f64, lo: f64, hi: f64 },

    #[error("geodesic construction failed: {0}")]
    Geodesic(String),

    #[error("invalid circuit configuration: {0}")]
    Config(String),

    #[error("controller did not terminate within {0} steps")]
    NonTermination(u64),

    #[error("power-law fit undefined: {0}")]
    Fit(String),
}
