use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid tone: {0}")]
    InvalidTone(String),

    #[error("invalid estimator config: {0}")]
    InvalidConfig(String),

    #[error("invalid sweep config: {0}")]
    InvalidSweep(String),

    #[error("xi = {xi} lies outside [-{q}, {q}]")]
    Domain { xi: f64, q: f64 },

    #[error("shift q = {0} must lie in (0, 0.5]")]
    InvalidShift(f64),

    #[error("taylor coefficients did not stabilize for N = {n}, q = {q}: {detail}")]
    TaylorUnstable { n: usize, q: f64, detail: String },

    #[error("degenerate Pade model: c3 = 0")]
    DegenerateModel,

    #[error("cubic has no near-real root (rho = {rho})")]
    NoRealRoot { rho: f64 },

    #[error("interpolated coefficients have zero energy")]
    ZeroSignal,

    #[error("empty report")]
    EmptyReport,

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
