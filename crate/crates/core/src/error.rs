use thiserror::Error;

/// Errors raised by the models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside its physical domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Inputs are individually valid but describe a non-physical situation.
    #[error("non-physical input: {0}")]
    NonPhysical(String),

    /// The OPA operating point is at or above oscillation threshold.
    #[error("pump parameter x = {x} is at or above threshold (x must be < 1)")]
    AboveThreshold { x: f64 },

    /// Not enough samples for the requested spectral resolution.
    #[error("insufficient samples: need at least {needed}, have {available}")]
    InsufficientSamples { needed: usize, available: usize },

    /// The sampling configuration cannot represent the requested band.
    #[error("under-sampled: {0}")]
    UnderSampled(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
