//! Decision-maker side: strategic and non-strategic utilities, the
//! three-term decomposition of their difference, the adjusted-preference
//! objective, and threshold optimization.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::response::PopulationModel;

/// Non-negative weights on the decomposition terms. `(1, 1, 1)` recovers the
/// plain strategic objective; `(0, 0, 0)` the non-strategic one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreferenceWeights {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl PreferenceWeights {
    pub const ORIGINAL: Self = Self {
        k1: 1.0,
        k2: 1.0,
        k3: 1.0,
    };

    pub fn new(k1: f64, k2: f64, k3: f64) -> Result<Self, ModelError> {
        for (name, value) in [("k1", k1), ("k2", k2), ("k3", k3)] {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(ModelError::RateOutOfRange { name, value });
            }
        }
        Ok(Self { k1, k2, k3 })
    }

    /// Replaces one component, keeping the others.
    pub fn with_axis(self, axis: WeightAxis, value: f64) -> Self {
        let mut w = self;
        match axis {
            WeightAxis::K1 => w.k1 = value,
            WeightAxis::K2 => w.k2 = value,
            WeightAxis::K3 => w.k3 = value,
        }
        w
    }
}

impl Default for PreferenceWeights {
    fn default() -> Self {
        Self::ORIGINAL
    }
}

/// Which preference weight a sweep or adjustment plan varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightAxis {
    K1,
    K2,
    K3,
}

impl std::fmt::Display for WeightAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WeightAxis::K1 => "k1",
            WeightAxis::K2 => "k2",
            WeightAxis::K3 => "k3",
        })
    }
}

/// Outcome of a threshold search. `actual_utility` is always the plain
/// strategic utility at `theta_star`, no matter which objective was
/// optimized.
#[derive(Debug, Clone, Copy)]
pub struct OptimizationResult {
    pub theta_star: f64,
    pub objective_value: f64,
    pub actual_utility: f64,
    pub at_boundary: bool,
    pub evaluations: usize,
}

/// The three decomposition terms: benefit from successful improvement,
/// loss from failed improvement, loss from manipulation.
#[derive(Debug, Clone, Copy)]
pub struct Decomposition {
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
}

/// One row of a weight sweep.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SweepRecord {
    pub k: f64,
    pub theta_star: f64,
    pub actual_utility: f64,
    pub p_manip: f64,
}

/// Utility of a threshold when strategic behavior is ignored.
pub fn nonstrategic_utility(model: &PopulationModel, theta: f64) -> f64 {
    let f1 = model.p1().cdf(theta);
    let f0 = model.p0().cdf(theta);
    let a = model.alpha();
    model.unit_utility() * (a * (1.0 - f1) - (1.0 - a) * (1.0 - f0))
}

/// Utility of a threshold against best-responding agents.
pub fn strategic_utility(model: &PopulationModel, theta: f64) -> f64 {
    let f1 = model.p1().cdf(theta);
    let fi = model.p_improved().cdf(theta);
    let pm = model.manipulation_probability(theta);
    let (a, q, e, u) = (model.alpha(), model.q(), model.eps(), model.unit_utility());
    u * (a + (1.0 - a) * (1.0 - pm) * q) * (1.0 - f1)
        - u * (1.0 - a) * ((1.0 - e) * pm * (1.0 - f1) + (1.0 - pm) * (1.0 - q) * (1.0 - fi))
}

/// Decomposition terms of the strategic/non-strategic objective difference;
/// the identity `nonstrategic + u (1-a) (phi1 - phi2 - phi3) = strategic`
/// holds pointwise.
pub fn decomposition(model: &PopulationModel, theta: f64) -> Decomposition {
    let f1 = model.p1().cdf(theta);
    let f0 = model.p0().cdf(theta);
    let fi = model.p_improved().cdf(theta);
    let pm = model.manipulation_probability(theta);
    let (q, e) = (model.q(), model.eps());
    Decomposition {
        phi1: (1.0 - pm) * q * ((1.0 - f0) + (1.0 - f1)),
        phi2: (1.0 - pm) * (1.0 - q) * (f0 - fi),
        phi3: pm * ((1.0 - e) * (1.0 - f1) - (1.0 - f0)),
    }
}

/// Objective with re-weighted decomposition terms.
pub fn adjusted_objective(model: &PopulationModel, theta: f64, weights: PreferenceWeights) -> f64 {
    let d = decomposition(model, theta);
    let scale = model.unit_utility() * (1.0 - model.alpha());
    nonstrategic_utility(model, theta)
        + scale * (weights.k1 * d.phi1 - weights.k2 * d.phi2 - weights.k3 * d.phi3)
}

/// Number of initial grid points used by [`optimize`].
pub const OPTIMIZE_GRID: usize = 4000;

/// Maximizes the adjusted objective by a dense grid scan followed by
/// golden-section refinement in the best bracketing cell. Ties break toward
/// the smallest threshold.
pub fn optimize(model: &PopulationModel, weights: PreferenceWeights) -> OptimizationResult {
    let (lo, hi) = model.theta_bounds();
    let mut evaluations = 0usize;
    let mut eval = |t: f64| {
        evaluations += 1;
        adjusted_objective(model, t, weights)
    };
    let n = OPTIMIZE_GRID;
    let mut best_i = 0usize;
    let mut best_y = f64::NEG_INFINITY;
    let mut xs = Vec::with_capacity(n);
    for i in 0..n {
        let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        xs.push(x);
        let y = eval(x);
        if y > best_y {
            best_y = y;
            best_i = i;
        }
    }
    let a = xs[best_i.saturating_sub(1)];
    let b = xs[(best_i + 1).min(n - 1)];
    let (theta, value, evals2) = golden_max(
        |t| adjusted_objective(model, t, weights),
        a,
        b,
        1e-9 * (hi - lo).max(1.0),
    );
    let evaluations = evaluations + evals2;
    // keep the grid argmax when refinement did not actually improve on it
    let (theta_star, objective_value) = if value >= best_y {
        (theta, value)
    } else {
        (xs[best_i], best_y)
    };
    let span = hi - lo;
    OptimizationResult {
        theta_star,
        objective_value,
        actual_utility: strategic_utility(model, theta_star),
        at_boundary: (theta_star - lo).abs() < 1e-6 * span || (theta_star - hi).abs() < 1e-6 * span,
        evaluations,
    }
}

/// Golden-section maximization on `[a, b]`; returns `(x, f(x), evaluations)`.
/// On plateaus the search drifts left, matching the smallest-theta tie rule.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64, usize) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evals = 2;
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        evals += 1;
    }
    let x = if f1 >= f2 { x1 } else { x2 };
    let y = if f1 >= f2 { f1 } else { f2 };
    (x, y, evals)
}

/// Maximizes the non-strategic objective. Under the likelihood-ratio
/// ordering the optimum is the root of
/// `p1(theta) / p0(theta) = (1 - alpha) / alpha`, found by bisection; when no
/// root lies in the search interval the better boundary is returned with
/// `at_boundary` set.
pub fn optimize_nonstrategic(model: &PopulationModel) -> OptimizationResult {
    let target = ((1.0 - model.alpha()) / model.alpha()).ln();
    let f = |x: f64| model.p1().ln_pdf(x) - model.p0().ln_pdf(x) - target;
    let (mut lo, mut hi) = model.theta_bounds();
    let (blo, bhi) = (lo, hi);
    let mut evaluations = 2;
    if f(lo) > 0.0 || f(hi) < 0.0 {
        let (ulo, uhi) = (
            nonstrategic_utility(model, lo),
            nonstrategic_utility(model, hi),
        );
        let theta = if ulo >= uhi { lo } else { hi };
        return OptimizationResult {
            theta_star: theta,
            objective_value: ulo.max(uhi),
            actual_utility: strategic_utility(model, theta),
            at_boundary: true,
            evaluations,
        };
    }
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        evaluations += 1;
    }
    let theta = 0.5 * (lo + hi);
    let span = bhi - blo;
    OptimizationResult {
        theta_star: theta,
        objective_value: nonstrategic_utility(model, theta),
        actual_utility: strategic_utility(model, theta),
        at_boundary: (theta - blo).abs() < 1e-6 * span || (theta - bhi).abs() < 1e-6 * span,
        evaluations,
    }
}

/// Side-by-side report of the strategic and non-strategic optima.
#[derive(Debug, Clone, Copy)]
pub struct ComparisonReport {
    pub theta_star: f64,
    pub theta_hat: f64,
    pub strategic_below: bool,
    pub min_manipulation_probability: f64,
}

/// Compares the two optima and reports the minimum manipulation probability
/// over the threshold grid.
pub fn compare_strategic_nonstrategic(model: &PopulationModel) -> ComparisonReport {
    let strategic = optimize(model, PreferenceWeights::ORIGINAL);
    let nonstrategic = optimize_nonstrategic(model);
    let (lo, hi) = model.theta_bounds();
    let mut min_pm = f64::INFINITY;
    for i in 0..OPTIMIZE_GRID {
        let t = lo + (hi - lo) * i as f64 / (OPTIMIZE_GRID - 1) as f64;
        min_pm = min_pm.min(model.manipulation_probability(t));
    }
    ComparisonReport {
        theta_star: strategic.theta_star,
        theta_hat: nonstrategic.theta_star,
        strategic_below: strategic.theta_star < nonstrategic.theta_star,
        min_manipulation_probability: min_pm,
    }
}

/// Optimizes once per grid value of the chosen weight, holding the other two
/// at 1.
pub fn sweep_weights(model: &PopulationModel, axis: WeightAxis, grid: &[f64]) -> Vec<SweepRecord> {
    grid.iter()
        .map(|&k| {
            let r = optimize(model, PreferenceWeights::ORIGINAL.with_axis(axis, k));
            SweepRecord {
                k,
                theta_star: r.theta_star,
                actual_utility: r.actual_utility,
                p_manip: model.manipulation_probability(r.theta_star),
            }
        })
        .collect()
}
