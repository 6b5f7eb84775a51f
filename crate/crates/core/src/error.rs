use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    /// The input does not have the numerical rank the caller asked for.
    #[error("rank mismatch: expected rank {expected}, sigma[{expected}]/sigma[{}] = {ratio:e}", expected - 1)]
    RankMismatch { expected: usize, ratio: f64 },

    #[error("singular sigma: diagonal entry {value:e} is below {tolerance:e}")]
    SingularSigma { value: f64, tolerance: f64 },

    #[error("gap collapse: delta = {0:e} is not positive")]
    GapCollapse(f64),

    #[error("invalid value for `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
