use thiserror::Error;

use crate::model::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid MDP:\n{0}")]
    Invalid(ValidationReport),

    #[error("augmented layer {layer} has {size} states, exceeding the cap of {cap}")]
    AugmentationCap { layer: usize, size: usize, cap: usize },

    #[error("policy does not cover reachable decision point {0}")]
    UncoveredState(String),

    #[error("malformed policy: {0}")]
    Policy(String),

    #[error("missing child polygon for stage {t}, state `{state}`, w = {w}")]
    MissingChild { t: usize, state: String, w: String },

    #[error("{what} count {count} exceeds the cap of {cap}")]
    Cap { what: &'static str, count: u128, cap: u128 },

    #[error("tolerance `{0}` must be strictly positive")]
    NonPositiveTolerance(&'static str),

    #[error("operation requires integer rewards; discretize first")]
    NonIntegerRewards,

    #[error("empty moment polygon")]
    EmptyPolygon,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
