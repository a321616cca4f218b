//! Property tests for the distribution and best-response invariants.

use proptest::prelude::*;

use stratclass_core::dist::FeatureDistribution;
use stratclass_core::oracle::empirical_cdf;
use stratclass_core::presets::gaussian_setting;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gaussian_quantile_round_trip(
        mean in -5.0f64..5.0,
        std in 0.1f64..3.0,
        p in 0.001f64..0.999,
    ) {
        let d = FeatureDistribution::gaussian(mean, std).unwrap();
        let x = d.quantile(p).unwrap();
        prop_assert!((d.cdf(x) - p).abs() < 1e-9);
    }

    #[test]
    fn beta_quantile_round_trip(
        a in 0.3f64..8.0,
        b in 0.3f64..8.0,
        p in 0.001f64..0.999,
    ) {
        let d = FeatureDistribution::beta(a, b).unwrap();
        let x = d.quantile(p).unwrap();
        prop_assert!((d.cdf(x) - p).abs() < 1e-9);
    }

    #[test]
    fn cdf_monotone_on_random_pairs(
        mean in -3.0f64..3.0,
        std in 0.2f64..2.0,
        x1 in -8.0f64..8.0,
        x2 in -8.0f64..8.0,
    ) {
        let d = FeatureDistribution::gaussian(mean, std).unwrap();
        let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
        prop_assert!(d.cdf(lo) <= d.cdf(hi) + 1e-15);
    }

    #[test]
    fn manipulation_probability_in_unit_interval(
        alpha in 0.05f64..0.95,
        q in 0.0f64..1.0,
        eps in 0.0f64..1.0,
        theta in -6.0f64..6.0,
    ) {
        let m = gaussian_setting(alpha, q, eps).unwrap();
        let pm = m.manipulation_probability(theta);
        prop_assert!((0.0..=1.0).contains(&pm));
        // the gap stays inside [-eps, 1-q]
        let gap = m.net_gap(theta);
        prop_assert!(gap >= -eps - 1e-12 && gap <= 1.0 - q + 1e-12);
    }

    #[test]
    fn empirical_cdf_bounds_and_monotonicity(
        values in prop::collection::vec(-50.0f64..50.0, 2..40),
        x in -60.0f64..60.0,
    ) {
        let d = empirical_cdf(&values);
        prop_assume!(d.is_ok());
        let d = d.unwrap();
        let c = d.cdf(x);
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert!(d.cdf(x + 1.0) >= c - 1e-15);
    }
}

/// The manipulation-probability curve is continuous: on a fine grid its
/// increments stay within the modulus implied by the cost density bound and
/// the gap's Lipschitz constant.
#[test]
fn manipulation_probability_continuity_modulus() {
    let m = gaussian_setting(0.4, 0.25, 0.25).unwrap();
    // cost pdf sup = 1/(0.25 sqrt(2 pi)); net gap Lipschitz constant is
    // bounded by (1-q+eps) * sup pdf of the feature laws = 1.0 * 0.399
    let cost_sup = 1.0 / (0.25 * (2.0 * std::f64::consts::PI).sqrt());
    let gap_lipschitz = (1.0 - m.q() + m.eps()) * 0.399;
    let step = 1e-3;
    let modulus = cost_sup * gap_lipschitz * step * 1.1;
    let (lo, hi) = m.theta_bounds();
    let mut t = lo;
    let mut prev = m.manipulation_probability(t);
    while t < hi {
        t += step;
        let cur = m.manipulation_probability(t);
        assert!(
            (cur - prev).abs() <= modulus,
            "jump {} at theta = {t}",
            (cur - prev).abs()
        );
        prev = cur;
    }
}

/// Monotone regime: P_M non-decreasing when q + eps >= 1; single-peaked
/// around the regime's peak otherwise.
#[test]
fn manipulation_probability_regime_shapes() {
    use stratclass_core::ResponseRegime;

    let m = gaussian_setting(0.3, 0.6, 0.5).unwrap();
    let (lo, hi) = m.theta_bounds();
    let mut prev = f64::NEG_INFINITY;
    for i in 0..2000 {
        let t = lo + (hi - lo) * i as f64 / 1999.0;
        let pm = m.manipulation_probability(t);
        assert!(pm >= prev - 1e-12, "decreasing at {t}");
        prev = pm;
    }

    let m = gaussian_setting(0.3, 0.3, 0.3).unwrap();
    let peak = match m.response_regime() {
        ResponseRegime::SinglePeaked { theta_max, .. } => theta_max,
        other => panic!("expected single peak, got {other:?}"),
    };
    let mut prev = f64::NEG_INFINITY;
    for i in 0..1000 {
        let t = lo + (peak - lo) * i as f64 / 999.0;
        let pm = m.manipulation_probability(t);
        assert!(pm >= prev - 1e-12, "not rising left of the peak at {t}");
        prev = pm;
    }
    let mut prev = f64::INFINITY;
    for i in 0..1000 {
        let t = peak + (hi - peak) * i as f64 / 999.0;
        let pm = m.manipulation_probability(t);
        assert!(pm <= prev + 1e-12, "not falling right of the peak at {t}");
        prev = pm;
    }
}
