use crate::model::SourceType;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must be a probability in [0, 1], got {value}")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("{name} must be a finite nonnegative real, got {value}")]
    InvalidWeight { name: &'static str, value: f64 },

    #[error("source prior entries must sum to 1, got {sum}")]
    PriorNotNormalized { sum: f64 },

    #[error("receiver type {0} violates out_group_penalty >= in_group_penalty")]
    AssumptionViolated(SourceType),

    #[error("augmented parameter for type {0} is 0/0 (receiver has no stake in any outcome)")]
    IndeterminateParams(SourceType),

    #[error("resolution {delta} must satisfy 0 < delta < M (M = {max}, M > 1)")]
    InvalidResolution { delta: f64, max: f64 },

    #[error("no encoding strategy is believed by both receiver types")]
    EmptyFeasibleSet,

    #[error("receiver type {0} does not believe the announced strategy")]
    NonBelievingReceiver(SourceType),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("no recorded answer for query (side {side}, n_A {n_a}, n_B {n_b})")]
    UnrecordedQuery { side: SourceType, n_a: f64, n_b: f64 },

    #[error("sample size must be positive")]
    InvalidSampleSize,

    #[error("oracle log: {0}")]
    OracleLog(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
