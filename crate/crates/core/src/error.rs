use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("spectrum has no levels")]
    EmptySpectrum,

    #[error("duplicate energy level {energy} (levels must be distinct)")]
    DuplicateLevel { energy: f64 },

    #[error("frequencies {omega1} and {omega2} are commensurate (ratio ~ {p}/{q})")]
    CommensurateFrequencies {
        omega1: f64,
        omega2: f64,
        p: i64,
        q: i64,
    },

    #[error("operands live over different frequency modules")]
    ModuleMismatch,

    #[error("product would exceed the term budget of {cap} terms")]
    TermBudgetExceeded { cap: usize },

    #[error("density is negative: sampled minimum {min} below tolerance")]
    PositivityCheckFailed { min: f64 },

    #[error("spectrum has shared resonances; closed-form purity identity does not apply")]
    SharedResonances,

    #[error("entropy backend `{backend}` is not applicable: {reason}")]
    BackendInapplicable {
        backend: &'static str,
        reason: String,
    },

    #[error("time-average ladder did not converge: spread {spread:e} > tolerance {tolerance:e} at horizon {horizon}")]
    NonConvergent {
        spread: f64,
        tolerance: f64,
        horizon: f64,
    },

    #[error("operator is not positive semidefinite: {0}")]
    NotPositive(String),

    #[error("diagonal constraint violated at level {level} (d={d}, d'={d_prime}): entry {value}")]
    DiagonalViolation {
        level: usize,
        d: usize,
        d_prime: usize,
        value: String,
    },

    #[error("second derivative of the spectrum vanishes; revival time undefined")]
    RevivalUndefined,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalised: norm^2 = {0}")]
    NotNormalised(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integer overflow in exact frequency arithmetic")]
    Overflow,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
