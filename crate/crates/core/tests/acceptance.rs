//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line (run with `-- --nocapture` to see them for passing
//! criteria; failing criteria always show their detail).
//!
//! Criteria 1-3 compare against published reference tables for the Gaussian
//! benchmark. Two of those reference entries are internally inconsistent
//! with the model equations (see the assertions' output); the comparisons
//! are asserted as stated rather than loosened.

mod common;

use std::time::Instant;

use common::{binomial_se, random_model};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use stratclass_core::dist::{CostDiffDistribution, FeatureDistribution};
use stratclass_core::estimation::{run_estimation_pipeline, PipelineConfig};
use stratclass_core::fairness::{FairnessMetric, GroupScenario};
use stratclass_core::harness::tables::{
    gaussian_settings, noise_sweep, scenario_table, NoisyParam, TableRecord,
};
use stratclass_core::oracle::{sample_population_mixture, simulate, SimOptions};
use stratclass_core::policy::{
    nonstrategic_utility, optimize, optimize_nonstrategic, strategic_utility, PreferenceWeights,
    WeightAxis,
};
use stratclass_core::presets::{
    credit_fixture_scenario, gaussian_scenario, gaussian_setting, gaussian_setting_with_bounds,
};
use stratclass_core::{PopulationSpec, ResponseRegime};

const UTIL_TOL: f64 = 0.005;
const RATE_TOL: f64 = 0.01;

/// Reference row: per-group utilities, per-group manipulation
/// probabilities, unfairness.
struct RowRef {
    util: (f64, f64),
    pm: (f64, f64),
    unf: f64,
}

struct TableRef {
    name: &'static str,
    rows: [RowRef; 3],
}

/// Published reference for the q = eps = 0.2, alphas (0.30, 0.35) setting.
const COND2_REF: TableRef = TableRef {
    name: "condition-2 reference",
    rows: [
        RowRef {
            util: (-0.036, -0.014),
            pm: (0.674, 0.686),
            unf: 0.088,
        },
        RowRef {
            util: (0.001, 0.004),
            pm: (0.508, 0.547),
            unf: 0.084,
        },
        RowRef {
            util: (0.0, 0.0),
            pm: (0.500, 0.500),
            unf: 0.002,
        },
    ],
};

/// Published candidate tables for the two condition-1 settings; the source's
/// text/table cross-references are inconsistent, so each parameter set may
/// match either candidate in full.
const CAND_A: TableRef = TableRef {
    name: "candidate A",
    rows: [
        RowRef {
            util: (0.054, 0.327),
            pm: (0.519, 0.368),
            unf: 0.280,
        },
        RowRef {
            util: (0.081, 0.384),
            pm: (0.266, 0.168),
            unf: 0.073,
        },
        RowRef {
            util: (0.088, 0.385),
            pm: (0.176, 0.159),
            unf: 0.008,
        },
    ],
};

const CAND_B: TableRef = TableRef {
    name: "candidate B",
    rows: [
        RowRef {
            util: (0.029, 0.060),
            pm: (0.434, 0.393),
            unf: 0.086,
        },
        RowRef {
            util: (0.204, 0.251),
            pm: (0.046, 0.040),
            unf: 0.019,
        },
        RowRef {
            util: (0.191, 0.241),
            pm: (0.023, 0.023),
            unf: 0.0,
        },
    ],
};

/// Compares a computed table to a reference; returns one line per entry out
/// of tolerance.
fn mismatches(rows: &[TableRecord], reference: &TableRef) -> Vec<String> {
    let mut out = Vec::new();
    for (row, r) in rows.iter().zip(reference.rows.iter()) {
        let mut check = |what: &str, got: f64, want: f64, tol: f64| {
            if (got - want).abs() > tol {
                out.push(format!(
                    "  {} {}: computed {:.4} vs reference {:.4} (tol {tol})",
                    row.row, what, got, want
                ));
            }
        };
        check("util_a", row.util_a, r.util.0, UTIL_TOL);
        check("util_b", row.util_b, r.util.1, UTIL_TOL);
        check("pm_a", row.pm_a, r.pm.0, RATE_TOL);
        check("pm_b", row.pm_b, r.pm.1, RATE_TOL);
        check("unfairness", row.unfairness, r.unf, RATE_TOL);
    }
    out
}

fn gaussian_scenario_with_cost(
    alpha_a: f64,
    alpha_b: f64,
    q: f64,
    eps: f64,
    cost_std: f64,
) -> GroupScenario {
    let build = |alpha: f64| {
        PopulationSpec {
            alpha,
            p1: FeatureDistribution::gaussian(1.0, 1.0).unwrap(),
            p0: FeatureDistribution::gaussian(0.0, 1.0).unwrap(),
            p_improved: FeatureDistribution::gaussian(0.5, 1.0).unwrap(),
            cost_diff: CostDiffDistribution::gaussian(0.0, cost_std).unwrap(),
            q,
            eps,
            u: 1.0,
            theta_bounds: None,
        }
        .build()
        .unwrap()
    };
    GroupScenario::new(
        ("a".into(), build(alpha_a)),
        ("b".into(), build(alpha_b)),
        FairnessMetric::EqOpt,
    )
    .unwrap()
}

fn condition2_table(cost_std: f64) -> Vec<TableRecord> {
    let scenario = gaussian_scenario_with_cost(0.3, 0.35, 0.2, 0.2, cost_std);
    scenario_table(&scenario, (WeightAxis::K2, WeightAxis::K2), 1.25)
}

#[test]
fn criterion_01_condition2_table_reproduction() {
    let start = Instant::now();
    let rows = condition2_table(0.25);
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 60,
        "analytic table took {elapsed:?}, budget is 60 s"
    );
    let bad = mismatches(&rows, &COND2_REF);
    if bad.is_empty() {
        println!("criterion 01: PASS (all 15 scalars within tolerance, {elapsed:?})");
    } else {
        println!(
            "criterion 01: FAIL ({} of 15 scalars out of tolerance)\n{}",
            bad.len(),
            bad.join("\n")
        );
        println!(
            "note: the reference row 'non_strategic pm' and the adjusted row are \
             unreachable under the model equations at any cost scale; the computed \
             utilities (which match) pin the same thresholds that produce the \
             computed pm values."
        );
    }
    assert!(
        bad.is_empty(),
        "condition-2 reference mismatches:\n{}",
        bad.join("\n")
    );
}

#[test]
fn criterion_02_condition1_tables_reproduction() {
    // q = eps = 0.5, alphas (0.20, 0.25), adjusted weight k1 = 1.25
    let s1 = gaussian_scenario(0.2, 0.25, 0.5, 0.5).unwrap();
    let rows_1i = scenario_table(&s1, (WeightAxis::K1, WeightAxis::K1), 1.25);
    // q = eps = 0.25, alphas (0.40, 0.60), adjusted weight k1 = 1.25
    let s2 = gaussian_scenario(0.4, 0.6, 0.25, 0.25).unwrap();
    let rows_1ii = scenario_table(&s2, (WeightAxis::K1, WeightAxis::K1), 1.25);

    let mut failures = Vec::new();
    for (label, rows) in [("q=eps=0.5 set", &rows_1i), ("q=eps=0.25 set", &rows_1ii)] {
        let vs_a = mismatches(rows, &CAND_A);
        let vs_b = mismatches(rows, &CAND_B);
        let (best_name, best) = if vs_a.len() <= vs_b.len() {
            (CAND_A.name, vs_a)
        } else {
            (CAND_B.name, vs_b)
        };
        if best.is_empty() {
            println!("criterion 02: {label} matches {best_name} in full");
        } else {
            println!(
                "criterion 02: {label} fails both candidates; closest is {best_name} \
                 with {} mismatches:\n{}",
                best.len(),
                best.join("\n")
            );
            failures.extend(best);
        }
    }
    if failures.is_empty() {
        println!("criterion 02: PASS");
    } else {
        println!(
            "criterion 02: FAIL\nnote: the two failing entries are the group-a \
             original/adjusted utilities, which the reference lists transposed; as \
             printed they would require the adjusted actual utility to exceed the \
             strategic optimum, which is impossible by definition of the optimum."
        );
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn criterion_03_cost_scale_calibration() {
    let at_025 = mismatches(&condition2_table(0.25), &COND2_REF);
    let at_050 = mismatches(&condition2_table(0.5), &COND2_REF);
    println!(
        "criterion 03: cost scale 0.25 -> {} mismatches, 0.5 -> {} mismatches",
        at_025.len(),
        at_050.len()
    );
    // the adopted interpretation (std = 0.25) must dominate the alternative,
    // and in particular reproduce every utility entry
    assert!(
        at_025.len() < at_050.len(),
        "std=0.25 should fit the reference strictly better than std=0.5"
    );
    assert!(
        !at_025.iter().any(|m| m.contains("util")),
        "utilities must reproduce under the adopted scale:\n{}",
        at_025.join("\n")
    );
    assert!(
        at_050.iter().any(|m| m.contains("util")),
        "the rejected scale should fail utility entries"
    );
    println!("criterion 03: PASS (adopted cost std 0.25)");
}

#[test]
fn criterion_04_manipulation_regimes() {
    // monotone branch: q + eps >= 1 means no decrease anywhere on the grid
    let m = gaussian_setting(0.4, 0.5, 0.5).unwrap();
    let (lo, hi) = m.theta_bounds();
    let mut prev = f64::NEG_INFINITY;
    let mut violations = 0;
    for i in 0..4000 {
        let t = lo + (hi - lo) * i as f64 / 3999.0;
        let pm = m.manipulation_probability(t);
        if pm < prev - 1e-12 {
            violations += 1;
        }
        prev = pm;
    }
    assert_eq!(violations, 0, "monotone regime must have zero violations");

    // single-peaked branch: peak within 1e-3 of the closed form
    let m = gaussian_setting(0.4, 0.25, 0.25).unwrap();
    let closed_form = 0.75 + 2.0 * (0.75f64 / 0.5).ln();
    let peak = match m.response_regime() {
        ResponseRegime::SinglePeaked { theta_max, .. } => theta_max,
        other => panic!("expected single peak, got {other:?}"),
    };
    assert!(
        (peak - closed_form).abs() < 1e-3,
        "peak {peak} vs closed form {closed_form}"
    );

    // peak location is monotone over a 10x10 rate grid
    let mut prev_row: Option<Vec<f64>> = None;
    for i in 0..10 {
        let q = 0.05 + 0.05 * i as f64;
        let mut row = Vec::new();
        for j in 0..10 {
            let eps = 0.04 + 0.04 * j as f64;
            let m = gaussian_setting_with_bounds(0.4, q, eps, (-6.0, 8.0)).unwrap();
            let peak = match m.response_regime() {
                ResponseRegime::SinglePeaked { theta_max, .. } => theta_max,
                other => panic!("grid point ({q}, {eps}): {other:?}"),
            };
            if let Some(&left) = row.last() {
                assert!(
                    peak >= left - 1e-9,
                    "peak not monotone in eps at ({q}, {eps})"
                );
            }
            row.push(peak);
        }
        if let Some(prev) = prev_row {
            for (a, b) in prev.iter().zip(row.iter()) {
                assert!(*b >= *a - 1e-9, "peak not monotone in q near q = {q}");
            }
        }
        prev_row = Some(row);
    }
    println!("criterion 04: PASS");
}

#[test]
fn criterion_05_decomposition_identity() {
    let mut rng = ChaCha12Rng::seed_from_u64(40);
    for trial in 0..10 {
        let m = random_model(&mut rng);
        let (lo, hi) = m.theta_bounds();
        let scale = m.unit_utility() * (1.0 - m.alpha());
        for i in 0..1000 {
            let t = lo + (hi - lo) * i as f64 / 999.0;
            let d = stratclass_core::policy::decomposition(&m, t);
            let lhs = nonstrategic_utility(&m, t) + scale * (d.phi1 - d.phi2 - d.phi3);
            let rhs = strategic_utility(&m, t);
            assert!(
                (lhs - rhs).abs() < 1e-10,
                "identity off by {} at trial {trial}, theta {t}",
                (lhs - rhs).abs()
            );
        }
    }
    println!("criterion 05: PASS");
}

#[test]
fn criterion_06_preference_shift_propositions() {
    // raising k1 weakly lowers the optimum; k1 = 50 undercuts the
    // non-strategic threshold
    let m = gaussian_setting(0.4, 0.25, 0.25).unwrap();
    let theta_hat = optimize_nonstrategic(&m).theta_star;
    let mut prev = f64::INFINITY;
    let mut k = 1.0;
    while k <= 3.0 + 1e-9 {
        let t = optimize(&m, PreferenceWeights::ORIGINAL.with_axis(WeightAxis::K1, k)).theta_star;
        assert!(t <= prev + 1e-6, "theta*(k1) rose at k1 = {k}");
        prev = t;
        k += 0.2;
    }
    let t50 = optimize(
        &m,
        PreferenceWeights::ORIGINAL.with_axis(WeightAxis::K1, 50.0),
    )
    .theta_star;
    assert!(t50 < theta_hat, "theta*(k1=50) = {t50} vs hat {theta_hat}");

    // raising k2 weakly raises the optimum when most of the population is
    // unqualified and improvement rarely succeeds
    let m = gaussian_setting(0.3, 0.1, 0.25).unwrap();
    let theta_hat = optimize_nonstrategic(&m).theta_star;
    let mut prev = f64::NEG_INFINITY;
    let mut k = 1.0;
    while k <= 3.0 + 1e-9 {
        let t = optimize(&m, PreferenceWeights::ORIGINAL.with_axis(WeightAxis::K2, k)).theta_star;
        assert!(t >= prev - 1e-6, "theta*(k2) fell at k2 = {k}");
        prev = t;
        k += 0.2;
    }
    let t50 = optimize(
        &m,
        PreferenceWeights::ORIGINAL.with_axis(WeightAxis::K2, 50.0),
    )
    .theta_star;
    assert!(t50 > theta_hat, "theta*(k2=50) = {t50} vs hat {theta_hat}");

    // near-certain improvement pulls the strategic optimum below the
    // non-strategic one
    let m = gaussian_setting(0.6, 0.99, 0.1).unwrap();
    let report = stratclass_core::policy::compare_strategic_nonstrategic(&m);
    assert!(report.min_manipulation_probability <= 0.5);
    assert!(
        report.strategic_below,
        "theta* {} vs hat {}",
        report.theta_star, report.theta_hat
    );
    println!("criterion 06: PASS");
}

#[test]
fn criterion_07_oracle_equivalence() {
    let start = Instant::now();
    let n = 100_000;
    let mut models = Vec::new();
    let mut rng = ChaCha12Rng::seed_from_u64(777);
    for _ in 0..20 {
        models.push(random_model(&mut rng));
    }
    for s in gaussian_settings() {
        models.push(gaussian_setting(s.alpha_a, s.q, s.eps).unwrap());
        models.push(gaussian_setting(s.alpha_b, s.q, s.eps).unwrap());
    }
    for (i, m) in models.iter().enumerate() {
        let (lo, hi) = m.theta_bounds();
        let theta = lo + 0.55 * (hi - lo);
        let seed = 9000 + i as u64;

        let r = simulate(m, theta, n, seed, SimOptions::default());
        let pm = m.manipulation_probability(theta);
        let unq = (1.0 - m.alpha()) * n as f64;
        assert!(
            (r.manipulation_rate - pm).abs() <= 3.0 * binomial_se(pm, unq),
            "model {i}: P_M {} vs {pm}",
            r.manipulation_rate
        );
        let se = 1.0 / (n as f64).sqrt();
        let analytic = strategic_utility(m, theta);
        assert!(
            (r.mean_utility - analytic).abs() <= 3.0 * se,
            "model {i}: U {} vs {analytic}",
            r.mean_utility
        );

        let mix = sample_population_mixture(m, n, seed + 500);
        let empirical: f64 = mix
            .iter()
            .map(|&(x, q)| match (x >= theta, q) {
                (true, true) => 1.0,
                (true, false) => -1.0,
                _ => 0.0,
            })
            .sum::<f64>()
            / n as f64;
        let analytic = nonstrategic_utility(m, theta);
        assert!(
            (empirical - analytic).abs() <= 3.0 * se,
            "model {i}: U-hat {empirical} vs {analytic}"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 300, "oracle battery took {elapsed:?}");
    println!(
        "criterion 07: PASS ({} configurations, {elapsed:?})",
        models.len()
    );
}

#[test]
fn criterion_08_estimation_pipeline() {
    let truth = gaussian_setting(0.4, 0.25, 0.25).unwrap();
    for seed in [11u64, 12, 13] {
        let cfg = PipelineConfig::default_for(&truth, 100_000, seed);
        assert_eq!(cfg.probe_thetas.len(), 8);
        let r = run_estimation_pipeline(&truth, &cfg).unwrap();
        assert!(
            r.q.abs_error <= 0.01,
            "seed {seed}: q error {}",
            r.q.abs_error
        );
        assert!(
            r.epsilon.abs_error <= 0.03,
            "seed {seed}: eps error {}",
            r.epsilon.abs_error
        );
        for (name, err) in [
            ("p0 location", r.p0_location.abs_error),
            ("p0 scale", r.p0_scale.abs_error),
            ("p_improved location", r.p_improved_location.abs_error),
            ("p_improved scale", r.p_improved_scale.abs_error),
            ("cost location", r.cost_location.abs_error),
            ("cost scale", r.cost_scale.abs_error),
        ] {
            assert!(err <= 0.05, "seed {seed}: {name} error {err}");
        }
    }
    println!("criterion 08: PASS (3 seeds within tolerance)");
}

#[test]
fn criterion_09_noise_robustness() {
    let scenario = credit_fixture_scenario().unwrap();
    let axes = (WeightAxis::K1, WeightAxis::K1);
    let grid = [1.0, 1.25];
    for param in [NoisyParam::Q, NoisyParam::Eps] {
        for noise_std in [0.05, 0.1] {
            let rows = noise_sweep(&scenario, param, noise_std, 10, 2718, axes, &grid).unwrap();
            let (orig, adj) = (&rows[0], &rows[1]);
            assert!(
                adj.pm_a_mean < orig.pm_a_mean && adj.pm_b_mean < orig.pm_b_mean,
                "{param:?} std {noise_std}: mean P_M not reduced \
                 (({:.3}, {:.3}) -> ({:.3}, {:.3}))",
                orig.pm_a_mean,
                orig.pm_b_mean,
                adj.pm_a_mean,
                adj.pm_b_mean
            );
            assert!(
                adj.unfairness_mean < orig.unfairness_mean,
                "{param:?} std {noise_std}: mean unfairness not reduced \
                 ({:.3} -> {:.3})",
                orig.unfairness_mean,
                adj.unfairness_mean
            );
        }
    }
    println!("criterion 09: PASS (4 noise sweeps keep the qualitative ordering)");
}

#[test]
fn criterion_10_fixture_round_trip_substitute() {
    // Reproduction of the real credit-score table needs the original
    // preprocessed dataset, which is not shipped; the binding check is the
    // synthetic-fixture round trip plus criterion 9.
    use stratclass_core::fairness::{plan_adjustment, AdjustmentPlan};
    use stratclass_core::harness::fico::{ingest_fico, load_fico};

    let fixtures = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let input = load_fico(
        &fixtures.join("credit_scores.csv"),
        &fixtures.join("credit_alphas.csv"),
    )
    .unwrap();
    let cost = CostDiffDistribution::gaussian(0.0, 0.25).unwrap();
    let (scenario, summary) =
        ingest_fico(&input, 0.3, 0.5, 1.0, &cost, FairnessMetric::EqOpt).unwrap();

    let expected = [("a", (4.0, 2.0), (2.0, 4.0)), ("b", (3.5, 2.5), (1.5, 4.5))];
    for (name, p1, p0) in expected {
        let g = &summary.groups[name];
        assert!((g.p1.0 - p1.0).abs() < 0.1 && (g.p1.1 - p1.1).abs() < 0.1);
        assert!((g.p0.0 - p0.0).abs() < 0.1 && (g.p0.1 - p0.1).abs() < 0.1);
    }
    // the ingested scenario recommends raising k1 for both groups
    assert!(matches!(
        plan_adjustment(&scenario),
        AdjustmentPlan::Guaranteed {
            weight_a: WeightAxis::K1,
            weight_b: WeightAxis::K1,
            ..
        }
    ));
    println!("criterion 10: PASS (fixture round trip in lieu of the original dataset)");
}
