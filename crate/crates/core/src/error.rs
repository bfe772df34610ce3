use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("singular expression: {0}")]
    Singular(String),
    #[error("branch disagreement {disagreement:e} exceeds seam tolerance {tolerance:e} ({what})")]
    Seam {
        what: String,
        disagreement: f64,
        tolerance: f64,
    },
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
