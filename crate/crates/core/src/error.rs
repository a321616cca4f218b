//! Error types shared across the library.

use thiserror::Error;

/// Errors from distribution construction, evaluation, and fitting.
#[derive(Debug, Error)]
pub enum DistError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid must be strictly ascending at index {0}")]
    NonAscendingGrid(usize),
    #[error("cdf values must be non-decreasing in [0,1] at index {0}")]
    NonMonotoneCdf(usize),
    #[error("grid cdf must start at 0 and end at 1")]
    UncoveredCdf,
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("quantile probability must lie in (0,1), got {0}")]
    ProbabilityOutOfRange(f64),
    #[error("fit is rank-deficient: {0}")]
    RankDeficient(String),
    #[error("csv: {0}")]
    Csv(String),
}

/// Errors from assembling a population model.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("qualification rate must lie in (0,1), got {0}")]
    AlphaOutOfRange(f64),
    #[error("{name} must lie in [0,1], got {value}")]
    RateOutOfRange { name: &'static str, value: f64 },
    #[error("unit utility must be positive, got {0}")]
    NonPositiveUtility(f64),
    #[error("threshold bounds must satisfy lo < hi, got ({0}, {1})")]
    EmptyThetaBounds(f64, f64),
    #[error("monotone likelihood ratio fails for {pair} near x = {at}")]
    MlrViolation { pair: &'static str, at: f64 },
    #[error("cost-difference density is not positive on ({lo}, {hi}) near x = {at}")]
    CostSupportGap { lo: f64, hi: f64, at: f64 },
    #[error(transparent)]
    Dist(#[from] DistError),
}

/// Errors from the parameter-estimation pipeline.
#[derive(Debug, Error)]
pub enum EstimationError {
    #[error("ill-posed: {0}")]
    IllPosed(String),
    #[error("need at least {need} probes, got {got}")]
    TooFewProbes { need: usize, got: usize },
    #[error(transparent)]
    Dist(#[from] DistError),
}
