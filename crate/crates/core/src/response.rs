//! Agent side of the game: expected utilities of manipulation vs improvement,
//! the manipulation probability, and its regime as the threshold varies.

use crate::dist::{check_mlr, CostDiffDistribution, FeatureDistribution, DEFAULT_MLR_GRID};
use crate::error::ModelError;

/// One population's complete model.
///
/// `p1`, `p0` are the feature distributions of qualified and unqualified
/// individuals, `p_improved` the post-improvement distribution of those whose
/// label did not change. `q` is the improvement success probability, `eps`
/// the manipulation detection probability, `u` the decision-maker's unit
/// utility, and `theta_bounds` the threshold search interval.
#[derive(Debug, Clone)]
pub struct PopulationModel {
    alpha: f64,
    p1: FeatureDistribution,
    p0: FeatureDistribution,
    p_improved: FeatureDistribution,
    cost_diff: CostDiffDistribution,
    q: f64,
    eps: f64,
    u: f64,
    theta_bounds: (f64, f64),
}

/// Inputs for [`PopulationModel`]; `build` runs every invariant gate.
#[derive(Debug, Clone)]
pub struct PopulationSpec {
    pub alpha: f64,
    pub p1: FeatureDistribution,
    pub p0: FeatureDistribution,
    pub p_improved: FeatureDistribution,
    pub cost_diff: CostDiffDistribution,
    pub q: f64,
    pub eps: f64,
    pub u: f64,
    /// Defaults to the span of the central 99.8% quantile ranges of `p0`
    /// and `p1` when absent.
    pub theta_bounds: Option<(f64, f64)>,
}

impl PopulationSpec {
    pub fn build(self) -> Result<PopulationModel, ModelError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ModelError::AlphaOutOfRange(self.alpha));
        }
        for (name, value) in [("q", self.q), ("eps", self.eps)] {
            if !(0.0..=1.0).contains(&value) || !value.is_finite() {
                return Err(ModelError::RateOutOfRange { name, value });
            }
        }
        if !(self.u > 0.0) || !self.u.is_finite() {
            return Err(ModelError::NonPositiveUtility(self.u));
        }
        let theta_bounds = match self.theta_bounds {
            Some((lo, hi)) => {
                if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                    return Err(ModelError::EmptyThetaBounds(lo, hi));
                }
                (lo, hi)
            }
            None => default_theta_bounds(&self.p0, &self.p1)?,
        };
        let upper = check_mlr(&self.p1, &self.p_improved, DEFAULT_MLR_GRID);
        if !upper.holds {
            return Err(ModelError::MlrViolation {
                pair: "(p1, p_improved)",
                at: upper.first_violation.unwrap_or(f64::NAN),
            });
        }
        let lower = check_mlr(&self.p_improved, &self.p0, DEFAULT_MLR_GRID);
        if !lower.holds {
            return Err(ModelError::MlrViolation {
                pair: "(p_improved, p0)",
                at: lower.first_violation.unwrap_or(f64::NAN),
            });
        }
        let (lo, hi) = (-self.eps, 1.0 - self.q);
        if let Some(at) = self.cost_diff.positive_on(lo, hi) {
            return Err(ModelError::CostSupportGap { lo, hi, at });
        }
        Ok(PopulationModel {
            alpha: self.alpha,
            p1: self.p1,
            p0: self.p0,
            p_improved: self.p_improved,
            cost_diff: self.cost_diff,
            q: self.q,
            eps: self.eps,
            u: self.u,
            theta_bounds,
        })
    }
}

pub fn default_theta_bounds(
    p0: &FeatureDistribution,
    p1: &FeatureDistribution,
) -> Result<(f64, f64), ModelError> {
    let lo = p0.quantile(0.001)?.min(p1.quantile(0.001)?);
    let hi = p0.quantile(0.999)?.max(p1.quantile(0.999)?);
    Ok((lo, hi))
}

/// Shape of the manipulation probability over the threshold range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResponseRegime {
    /// `q + eps >= 1`: manipulation probability strictly increases.
    MonotoneIncreasing,
    /// `q + eps < 1`: single interior peak at `theta_max`. `clipped` is set
    /// when the peak equation has no root inside the search interval and the
    /// nearer boundary was returned instead.
    SinglePeaked { theta_max: f64, clipped: bool },
}

impl PopulationModel {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn unit_utility(&self) -> f64 {
        self.u
    }
    pub fn theta_bounds(&self) -> (f64, f64) {
        self.theta_bounds
    }
    pub fn p1(&self) -> &FeatureDistribution {
        &self.p1
    }
    pub fn p0(&self) -> &FeatureDistribution {
        &self.p0
    }
    pub fn p_improved(&self) -> &FeatureDistribution {
        &self.p_improved
    }
    pub fn cost_diff(&self) -> &CostDiffDistribution {
        &self.cost_diff
    }

    /// Returns a copy with `q`, `eps` replaced (re-validated).
    pub fn with_rates(&self, q: f64, eps: f64) -> Result<Self, ModelError> {
        PopulationSpec {
            alpha: self.alpha,
            p1: self.p1.clone(),
            p0: self.p0.clone(),
            p_improved: self.p_improved.clone(),
            cost_diff: self.cost_diff.clone(),
            q,
            eps,
            u: self.u,
            theta_bounds: Some(self.theta_bounds),
        }
        .build()
    }

    /// Cost-free gap between the expected utility of manipulating and of
    /// improving: `(1-q) (F_I(t) - F_1(t)) - eps (1 - F_1(t))`.
    pub fn net_gap(&self, theta: f64) -> f64 {
        net_gap_from(&self.p1, &self.p_improved, self.q, self.eps, theta)
    }

    /// Cost-free parts of the action utilities `(U_M, U_I)`; their difference
    /// equals [`net_gap`](Self::net_gap) identically.
    pub fn expected_utilities(&self, theta: f64) -> (f64, f64) {
        let f1 = self.p1.cdf(theta);
        let f0 = self.p0.cdf(theta);
        let fi = self.p_improved.cdf(theta);
        let u_m = f0 - f1 - self.eps * (1.0 - f1);
        let u_i = f0 - self.q * f1 - (1.0 - self.q) * fi;
        (u_m, u_i)
    }

    /// Probability that an unqualified individual prefers manipulation at
    /// threshold `theta`.
    pub fn manipulation_probability(&self, theta: f64) -> f64 {
        self.cost_diff.cdf(self.net_gap(theta))
    }

    /// Classifies the manipulation-probability curve and locates its peak
    /// when single-peaked, by bisection on the monotone log density ratio.
    pub fn response_regime(&self) -> ResponseRegime {
        if self.q + self.eps >= 1.0 {
            return ResponseRegime::MonotoneIncreasing;
        }
        let target = ((1.0 - self.q) / (1.0 - self.q - self.eps)).ln();
        let f = |x: f64| self.p1.ln_pdf(x) - self.p_improved.ln_pdf(x) - target;
        let (mut lo, mut hi) = self.theta_bounds;
        let (flo, fhi) = (f(lo), f(hi));
        if flo >= 0.0 {
            return ResponseRegime::SinglePeaked {
                theta_max: lo,
                clipped: true,
            };
        }
        if fhi <= 0.0 {
            return ResponseRegime::SinglePeaked {
                theta_max: hi,
                clipped: true,
            };
        }
        while hi - lo > 1e-8 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        ResponseRegime::SinglePeaked {
            theta_max: 0.5 * (lo + hi),
            clipped: false,
        }
    }
}

/// Shared gap formula, also used by the estimation pipeline where the
/// distributions and rates are estimates rather than model fields.
pub fn net_gap_from(
    p1: &FeatureDistribution,
    p_improved: &FeatureDistribution,
    q: f64,
    eps: f64,
    theta: f64,
) -> f64 {
    let f1 = p1.cdf(theta);
    let fi = p_improved.cdf(theta);
    (1.0 - q) * (fi - f1) - eps * (1.0 - f1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::gaussian_setting;

    #[test]
    fn net_gap_nonpositive_when_improvement_always_succeeds() {
        let m = gaussian_setting(0.4, 1.0, 0.25).unwrap();
        for i in 0..50 {
            let t = -4.0 + 8.0 * i as f64 / 49.0;
            assert!(m.net_gap(t) <= 1e-15, "net_gap({t}) = {}", m.net_gap(t));
        }
    }

    #[test]
    fn net_gap_limits() {
        let m = gaussian_setting(0.4, 0.25, 0.25).unwrap();
        assert!((m.net_gap(-40.0) - (-0.25)).abs() < 1e-12);
        assert!(m.net_gap(40.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_net_gap_at_three_quarters() {
        // q = eps = 0.25 benchmark: 0.75 (Phi(0.25) - Phi(-0.25)) - 0.25 (1 - Phi(-0.25))
        let m = gaussian_setting(0.4, 0.25, 0.25).unwrap();
        let phi = FeatureDistribution::gaussian(0.0, 1.0).unwrap();
        let expected = 0.75 * (phi.cdf(0.25) - phi.cdf(-0.25)) - 0.25 * (1.0 - phi.cdf(-0.25));
        assert!((m.net_gap(0.75) - expected).abs() < 1e-12);
        assert!((expected - (-0.0016170929)).abs() < 1e-9);
    }

    #[test]
    fn expected_utility_gap_identity() {
        let m = gaussian_setting(0.35, 0.3, 0.2).unwrap();
        for i in 0..100 {
            let t = -3.0 + 7.0 * i as f64 / 99.0;
            let (um, ui) = m.expected_utilities(t);
            assert!(
                ((um - ui) - m.net_gap(t)).abs() < 1e-12,
                "identity fails at theta = {t}"
            );
        }
    }

    #[test]
    fn expected_utility_limits() {
        let m = gaussian_setting(0.4, 0.25, 0.25).unwrap();
        // all cdfs -> 0: U_M -> -eps, U_I -> 0
        let (um, ui) = m.expected_utilities(-40.0);
        assert!((um - (-0.25)).abs() < 1e-12 && ui.abs() < 1e-12);
        // all cdfs -> 1: both vanish
        let (um, ui) = m.expected_utilities(40.0);
        assert!(um.abs() < 1e-12 && ui.abs() < 1e-12);
        // eps = 0 variant of the lower limit
        let m0 = gaussian_setting(0.4, 0.25, 0.0).unwrap();
        let (um, ui) = m0.expected_utilities(-40.0);
        assert!(um.abs() < 1e-12 && ui.abs() < 1e-12);
    }

    #[test]
    fn symmetric_cost_gives_half_at_zero_gap() {
        // q = 1, eps = 0 makes the gap identically zero
        let m = gaussian_setting(0.4, 1.0, 0.0).unwrap();
        for t in [-1.0, 0.3, 2.0] {
            assert!((m.manipulation_probability(t) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn regime_split_on_q_plus_eps() {
        let m = gaussian_setting(0.4, 0.5, 0.5).unwrap();
        assert_eq!(m.response_regime(), ResponseRegime::MonotoneIncreasing);

        // q = eps = 0.25: closed-form peak at 0.75 + 2 ln 1.5
        let m = gaussian_setting(0.4, 0.25, 0.25).unwrap();
        match m.response_regime() {
            ResponseRegime::SinglePeaked { theta_max, clipped } => {
                assert!(!clipped);
                let expected = 0.75 + 2.0 * 1.5f64.ln();
                assert!(
                    (theta_max - expected).abs() < 1e-6,
                    "theta_max = {theta_max}, expected {expected}"
                );
            }
            other => panic!("expected single peak, got {other:?}"),
        }
    }

    #[test]
    fn default_bounds_span_the_central_mass() {
        let m = gaussian_setting(0.4, 0.25, 0.25).unwrap();
        let (lo, hi) = m.theta_bounds();
        assert!((lo - (-3.090232306167813)).abs() < 1e-6, "lo = {lo}");
        assert!((hi - 4.090232306167813).abs() < 1e-6, "hi = {hi}");
    }

    #[test]
    fn peak_outside_bounds_is_clipped() {
        // q = 0.45, eps = 0.5: the peak equation root 0.75 + 2 ln 11 lies
        // beyond the default interval
        let m = gaussian_setting(0.4, 0.45, 0.5).unwrap();
        match m.response_regime() {
            ResponseRegime::SinglePeaked { theta_max, clipped } => {
                assert!(clipped);
                assert!((theta_max - m.theta_bounds().1).abs() < 1e-12);
            }
            other => panic!("expected clipped single peak, got {other:?}"),
        }
    }

    #[test]
    fn peak_moves_up_with_q_and_eps() {
        let mut prev_rows = Vec::new();
        for i in 0..10 {
            let q = 0.05 + 0.05 * i as f64;
            let mut row = Vec::new();
            for j in 0..10 {
                let eps = 0.04 + 0.04 * j as f64;
                let m =
                    crate::presets::gaussian_setting_with_bounds(0.4, q, eps, (-6.0, 8.0)).unwrap();
                let theta_max = match m.response_regime() {
                    ResponseRegime::SinglePeaked { theta_max, .. } => theta_max,
                    _ => panic!("q + eps < 1 must be single-peaked"),
                };
                if let Some(&prev) = row.last() {
                    assert!(theta_max >= prev - 1e-9, "not monotone in eps");
                }
                row.push(theta_max);
            }
            if let Some(prev) = prev_rows.last() {
                let prev: &Vec<f64> = prev;
                for (a, b) in prev.iter().zip(row.iter()) {
                    assert!(*b >= *a - 1e-9, "not monotone in q");
                }
            }
            prev_rows.push(row);
        }
    }

    #[test]
    fn invalid_models_rejected() {
        use crate::dist::{CostDiffDistribution, FeatureDistribution};
        let p1 = FeatureDistribution::gaussian(1.0, 1.0).unwrap();
        let p0 = FeatureDistribution::gaussian(0.0, 1.0).unwrap();
        let pi = FeatureDistribution::gaussian(0.5, 1.0).unwrap();
        let cost = CostDiffDistribution::gaussian(0.0, 0.25).unwrap();
        let spec = |alpha: f64| PopulationSpec {
            alpha,
            p1: p1.clone(),
            p0: p0.clone(),
            p_improved: pi.clone(),
            cost_diff: cost.clone(),
            q: 0.25,
            eps: 0.25,
            u: 1.0,
            theta_bounds: None,
        };
        assert!(matches!(
            spec(0.0).build().unwrap_err(),
            ModelError::AlphaOutOfRange(_)
        ));
        let mut bad = spec(0.4);
        bad.p_improved = FeatureDistribution::gaussian(0.5, 2.0).unwrap();
        assert!(matches!(
            bad.build().unwrap_err(),
            ModelError::MlrViolation { .. }
        ));
        let mut bad = spec(0.4);
        bad.theta_bounds = Some((2.0, 1.0));
        assert!(matches!(
            bad.build().unwrap_err(),
            ModelError::EmptyThetaBounds(..)
        ));
    }
}
