use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("spinor has zero norm")]
    ZeroNorm,

    #[error("{phase} step count {got} is below the minimum of {min}")]
    TooFewSteps {
        phase: &'static str,
        got: usize,
        min: usize,
    },

    #[error("non-finite state in {phase} integration at t = {t:e} s (z = {z:e} m)")]
    NonFinite { phase: &'static str, t: f64, z: f64 },

    #[error("histogram has no counts")]
    EmptyHistogram,

    #[error("at least one rotation angle is required")]
    EmptySweep,

    #[error("pair {index}: {source}")]
    Pair {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("worker pool: {0}")]
    Pool(String),
}

pub type Result<T> = std::result::Result<T, Error>;
