use thiserror::Error;

/// Failures reported by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e}) within {panels} panels")]
    QuadratureNonconvergence { tol: f64, estimate: f64, panels: usize },

    #[error("Hankel matrix is rank deficient: singular value {index} is {ratio:e} of the largest")]
    RankDeficient { index: usize, ratio: f64 },

    #[error("exponent {z_im} aliases at sampling step {dt}: |Im z| must stay below pi/dt")]
    Aliasing { z_im: f64, dt: f64 },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

pub type Result<T> = std::result::Result<T, Error>;
