use thiserror::Error;

/// Errors raised by the evaluation, root-finding and shooting layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} is outside its domain (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("no sign change on [{lo}, {hi}] (f(lo)={f_lo:e}, f(hi)={f_hi:e})")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("f has no positive part: omega={omega} >= max of u^(p-1) - u^(q-1) = {max}")]
    NoPositivePart { omega: f64, max: f64 },

    #[error("no ground state: omega={omega} >= existence threshold {threshold}")]
    ExistenceViolated { omega: f64, threshold: f64 },

    #[error("integration failed at r={r}: {reason}")]
    IntegrationFailure { r: f64, reason: String },

    #[error("shooting endpoints do not bracket the ground state: alpha={lo} gave {lo_outcome}, alpha={hi} gave {hi_outcome}")]
    Dichotomy {
        lo: f64,
        hi: f64,
        lo_outcome: String,
        hi_outcome: String,
    },

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
