use thiserror::Error;

/// Every failure the library reports. Budget and precision problems are
/// surfaced here rather than silently truncated.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("exact arithmetic overflow in {context}")]
    Overflow { context: &'static str },

    #[error("budget exceeded in {module}: {requested} > limit {limit}")]
    Budget { module: &'static str, limit: u128, requested: u128 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("plan violates condition `{condition}`: {detail}")]
    PlanViolation { condition: String, detail: String },

    #[error("refused: {0}")]
    Refused(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn budget(module: &'static str, limit: u128, requested: u128) -> Result<()> {
    if requested > limit {
        Err(Error::Budget { module, limit, requested })
    } else {
        Ok(())
    }
}
