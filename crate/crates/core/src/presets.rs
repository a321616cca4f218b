//! Built-in benchmark configurations used by the experiment harness and the
//! test suites.

use crate::dist::{CostDiffDistribution, FeatureDistribution};
use crate::error::ModelError;
use crate::fairness::{FairnessMetric, GroupScenario};
use crate::response::{PopulationModel, PopulationSpec};

/// Cost-difference scale of the Gaussian benchmark, calibrated against the
/// published reference tables (see the acceptance suite).
pub const GAUSSIAN_COST_STD: f64 = 0.25;

/// Gaussian benchmark population: `p0 = N(0,1)`, `p_improved = N(0.5,1)`,
/// `p1 = N(1,1)`, cost difference `N(0, 0.25)`, unit utility 1.
pub fn gaussian_setting(alpha: f64, q: f64, eps: f64) -> Result<PopulationModel, ModelError> {
    gaussian_spec(alpha, q, eps, None).build()
}

/// Same as [`gaussian_setting`] with an explicit threshold search interval.
pub fn gaussian_setting_with_bounds(
    alpha: f64,
    q: f64,
    eps: f64,
    bounds: (f64, f64),
) -> Result<PopulationModel, ModelError> {
    gaussian_spec(alpha, q, eps, Some(bounds)).build()
}

fn gaussian_spec(alpha: f64, q: f64, eps: f64, bounds: Option<(f64, f64)>) -> PopulationSpec {
    PopulationSpec {
        alpha,
        p1: FeatureDistribution::gaussian(1.0, 1.0).unwrap(),
        p0: FeatureDistribution::gaussian(0.0, 1.0).unwrap(),
        p_improved: FeatureDistribution::gaussian(0.5, 1.0).unwrap(),
        cost_diff: CostDiffDistribution::gaussian(0.0, GAUSSIAN_COST_STD).unwrap(),
        q,
        eps,
        u: 1.0,
        theta_bounds: bounds,
    }
}

/// Two-group Gaussian benchmark scenario with equal-opportunity fairness.
pub fn gaussian_scenario(
    alpha_a: f64,
    alpha_b: f64,
    q: f64,
    eps: f64,
) -> Result<GroupScenario, ModelError> {
    GroupScenario::new(
        ("a".into(), gaussian_setting(alpha_a, q, eps)?),
        ("b".into(), gaussian_setting(alpha_b, q, eps)?),
        FairnessMetric::EqOpt,
    )
}

/// Credit-score-like Beta population on `[0,1]`. The post-improvement
/// distribution follows the midpoint rule
/// `Beta((a1+a0)/2, (b1+b0)/2)`.
pub fn beta_population(
    alpha: f64,
    q: f64,
    eps: f64,
    p1: (f64, f64),
    p0: (f64, f64),
    cost_std: f64,
) -> Result<PopulationModel, ModelError> {
    PopulationSpec {
        alpha,
        p1: FeatureDistribution::beta(p1.0, p1.1)?,
        p0: FeatureDistribution::beta(p0.0, p0.1)?,
        p_improved: FeatureDistribution::beta(0.5 * (p1.0 + p0.0), 0.5 * (p1.1 + p0.1))?,
        cost_diff: CostDiffDistribution::gaussian(0.0, cost_std)?,
        q,
        eps,
        u: 1.0,
        theta_bounds: None,
    }
    .build()
}

/// Synthetic two-group credit-score fixture: Beta-distributed scores with
/// q = 0.3, eps = 0.5, cost difference `N(0, 0.25)`. Matches the fixture
/// CSVs shipped under `fixtures/`.
pub fn credit_fixture_scenario() -> Result<GroupScenario, ModelError> {
    let group_a = beta_population(0.7, 0.3, 0.5, (4.0, 2.0), (2.0, 4.0), GAUSSIAN_COST_STD)?;
    let group_b = beta_population(0.45, 0.3, 0.5, (3.5, 2.5), (1.5, 4.5), GAUSSIAN_COST_STD)?;
    GroupScenario::new(
        ("a".into(), group_a),
        ("b".into(), group_b),
        FairnessMetric::EqOpt,
    )
}
