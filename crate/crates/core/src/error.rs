use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("pattern budget exceeded: more than {budget} patterns required")]
    BudgetExceeded { budget: usize },

    #[error(
        "no time in [0, {horizon}] lies in enough assigned sets: best time {best_time} \
         hits {best_count} of {keys} keys"
    )]
    PigeonholeFailed {
        horizon: u64,
        best_time: u64,
        best_count: usize,
        keys: usize,
    },

    #[error("rotation parameter is too close to a rational with denominator {denominator}")]
    RationalRotation { denominator: String },

    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: u8, right: u8 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown system `{0}`")]
    UnknownSystem(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
