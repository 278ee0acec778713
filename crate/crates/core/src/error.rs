use thiserror::Error;

/// Errors raised by the analysis, integration and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum KppError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value encountered {context}")]
    NonFinite { context: String },

    #[error("negative state component {value:e} at t = {time}")]
    NegativeState { time: f64, value: f64 },

    #[error("mu = {mu} is not below the Hopf value {mu_h}; no oscillatory instability")]
    NoHopfInstability { mu: f64, mu_h: f64 },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("CFL condition violated: dt = {dt} exceeds {limit}")]
    Cfl { dt: f64, limit: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for KppError {
    fn from(e: std::io::Error) -> Self {
        KppError::Io(e.to_string())
    }
}

impl From<csv::Error> for KppError {
    fn from(e: csv::Error) -> Self {
        KppError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for KppError {
    fn from(e: serde_json::Error) -> Self {
        KppError::InvalidParameter(format!("JSON: {e}"))
    }
}

impl KppError {
    /// True for failures caused by bad inputs rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            KppError::InvalidParameter(_) | KppError::NoHopfInstability { .. } | KppError::Cfl { .. } | KppError::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, KppError>;
