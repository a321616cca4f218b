//! Threshold policies against imitative strategic behavior with
//! unforeseeable outcomes.
//!
//! The library models a Stackelberg game between a threshold decision-maker
//! and a population of agents who may manipulate (imitate qualified
//! features, risking detection) or improve (succeed with some probability).
//! It provides:
//!
//! - distribution primitives and validation ([`dist`]),
//! - the agents' best response and its regimes ([`response`]),
//! - decision-maker utilities, the three-term decomposition, and threshold
//!   optimization under adjustable preference weights ([`policy`]),
//! - two-group fairness diagnostics and adjustment planning ([`fairness`]),
//! - a seeded Monte-Carlo agent simulator that independently validates every
//!   analytic quantity ([`oracle`]),
//! - a controlled-experiment parameter-estimation pipeline ([`estimation`]),
//! - config-driven experiment reproduction and CSV/JSON emission
//!   ([`harness`]).

// guards like `!(x > 0.0)` intentionally treat NaN as out of range
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dist;
pub mod error;
pub mod estimation;
pub mod fairness;
pub mod harness;
pub mod oracle;
pub mod policy;
pub mod presets;
pub mod response;

pub use dist::{CostDiffDistribution, FeatureDistribution};
pub use error::{DistError, EstimationError, ModelError};
pub use fairness::{FairnessMetric, GroupScenario};
pub use policy::{OptimizationResult, PreferenceWeights, WeightAxis};
pub use response::{PopulationModel, PopulationSpec, ResponseRegime};
