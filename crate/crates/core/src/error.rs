use crate::qubit::Family;

/// Errors raised by the fidelity engine.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("squeezing must be finite and non-negative, got {0}")]
    InvalidSqueezing(f64),
    #[error("reflectivity must lie in [0, 1], got {0}")]
    InvalidReflectivity(f64),
    #[error("noise strength must lie in [0, 2], got {0}")]
    InvalidNoise(f64),
    #[error("covariance entries (eta = {eta}, c = {c}) are not a physical state")]
    UnphysicalCovariance { eta: f64, c: f64 },
    #[error("weight p must lie in [0, 1], got {0}")]
    InvalidWeight(f64),
    #[error("coherent amplitude must be finite and non-negative, got {0}")]
    InvalidAmplitude(f64),
    #[error("phase must be finite, got {0}")]
    InvalidPhase(f64),
    #[error("odd cat state is undefined at zero amplitude")]
    OddCatAtZero,
    #[error("state has {expected} modes but {got} phase points were given")]
    ModeMismatch { expected: usize, got: usize },
    #[error("state is not normalized (self-overlap {0})")]
    NotNormalized(f64),
    #[error("fidelity {value} lies outside [0, 1] beyond tolerance {tolerance}")]
    OutOfRange { value: f64, tolerance: f64 },
    #[error("analytic-moments averaging is unavailable for {0}: its normalization depends on (p, phi)")]
    MomentsUnsupported(Family),
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("invalid quadrature configuration: {0}")]
    InvalidQuadrature(&'static str),
    #[error("Monte Carlo needs at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
