use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {d}: {reason}")]
    InvalidDimension { d: usize, reason: &'static str },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix is singular (|det| = {det:e})")]
    Singular { det: f64 },

    #[error("matrix is ill-conditioned (condition estimate {cond:e} at step {step})")]
    IllConditioned { step: usize, cond: f64 },

    #[error("pinching violated at (k, h) = ({k}, {h}): measured constant {measured:e} exceeds {allowed:e}")]
    PinchingViolated {
        k: usize,
        h: usize,
        measured: f64,
        allowed: f64,
    },

    #[error("degenerate diagonal |{value:e}| below pinching margin {floor:e} at step {step}")]
    DegenerateDiagonal { step: usize, value: f64, floor: f64 },

    #[error("{condition} violated: log-margin {log_margin:e}")]
    Bunching {
        condition: &'static str,
        log_margin: f64,
    },

    #[error("series diverged at n = {n} after {terms} terms")]
    Divergence { n: usize, terms: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
