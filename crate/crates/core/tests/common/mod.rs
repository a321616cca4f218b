//! Shared helpers for the integration suites.

use rand::Rng;
use rand_chacha::ChaCha12Rng;

use stratclass_core::dist::{CostDiffDistribution, FeatureDistribution};
use stratclass_core::{PopulationModel, PopulationSpec};

pub fn binomial_se(p: f64, n: f64) -> f64 {
    (p * (1.0 - p) / n).sqrt().max(1e-9)
}

/// Draws a valid Gaussian-family model: ordered equal-variance feature
/// distributions keep the likelihood-ratio chain monotone.
pub fn random_model(rng: &mut ChaCha12Rng) -> PopulationModel {
    let alpha = rng.random_range(0.15..0.85);
    let q = rng.random_range(0.05..0.95);
    let eps = rng.random_range(0.05..0.95);
    let sigma = rng.random_range(0.6..1.6);
    let mu0 = rng.random_range(-1.0..0.5);
    let gap1 = rng.random_range(0.3..1.2);
    let gap2 = rng.random_range(0.3..1.2);
    let cost_mean = rng.random_range(-0.15..0.15);
    let cost_std = rng.random_range(0.15..0.6);
    PopulationSpec {
        alpha,
        p1: FeatureDistribution::gaussian(mu0 + gap1 + gap2, sigma).unwrap(),
        p0: FeatureDistribution::gaussian(mu0, sigma).unwrap(),
        p_improved: FeatureDistribution::gaussian(mu0 + gap1, sigma).unwrap(),
        cost_diff: CostDiffDistribution::gaussian(cost_mean, cost_std).unwrap(),
        q,
        eps,
        u: 1.0,
        theta_bounds: None,
    }
    .build()
    .unwrap()
}
