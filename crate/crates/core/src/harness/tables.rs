//! Built-in Gaussian benchmark tables and noise-robustness sweeps.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::ModelError;
use crate::fairness::{fairness_sweep, unfairness, GroupId, GroupScenario};
use crate::policy::{optimize, optimize_nonstrategic, PreferenceWeights, WeightAxis};
use crate::presets::gaussian_scenario;

use super::HarnessError;

/// One of the built-in two-group Gaussian benchmark settings.
#[derive(Debug, Clone, Copy)]
pub struct GaussianSetting {
    pub name: &'static str,
    pub q: f64,
    pub eps: f64,
    pub alpha_a: f64,
    pub alpha_b: f64,
    pub adjusted_axis: WeightAxis,
    pub adjusted_weight: f64,
}

/// The three benchmark settings; the adjusted row raises the weight the
/// incentive analysis recommends for each setting (1.25 in all of them).
pub fn gaussian_settings() -> [GaussianSetting; 3] {
    [
        GaussianSetting {
            name: "condition_1i",
            q: 0.5,
            eps: 0.5,
            alpha_a: 0.2,
            alpha_b: 0.25,
            adjusted_axis: WeightAxis::K1,
            adjusted_weight: 1.25,
        },
        GaussianSetting {
            name: "condition_1ii",
            q: 0.25,
            eps: 0.25,
            alpha_a: 0.4,
            alpha_b: 0.6,
            adjusted_axis: WeightAxis::K1,
            adjusted_weight: 1.25,
        },
        GaussianSetting {
            name: "condition_2",
            q: 0.2,
            eps: 0.2,
            alpha_a: 0.3,
            alpha_b: 0.35,
            adjusted_axis: WeightAxis::K2,
            adjusted_weight: 1.25,
        },
    ]
}

/// One table row: a policy family evaluated on both groups.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableRecord {
    pub row: String,
    pub theta_a: f64,
    pub theta_b: f64,
    pub util_a: f64,
    pub util_b: f64,
    pub pm_a: f64,
    pub pm_b: f64,
    pub unfairness: f64,
}

fn record(scenario: &GroupScenario, row: &str, theta_a: f64, theta_b: f64) -> TableRecord {
    let ga = scenario.group(GroupId::A);
    let gb = scenario.group(GroupId::B);
    TableRecord {
        row: row.into(),
        theta_a,
        theta_b,
        util_a: crate::policy::strategic_utility(ga, theta_a),
        util_b: crate::policy::strategic_utility(gb, theta_b),
        pm_a: ga.manipulation_probability(theta_a),
        pm_b: gb.manipulation_probability(theta_b),
        unfairness: unfairness(scenario, theta_a, theta_b),
    }
}

/// Non-strategic / original strategic / adjusted strategic rows for a
/// scenario. Utilities are always the actual (strategic) utilities of the
/// deployed thresholds.
pub fn scenario_table(
    scenario: &GroupScenario,
    axes: (WeightAxis, WeightAxis),
    adjusted_weight: f64,
) -> Vec<TableRecord> {
    let ga = scenario.group(GroupId::A);
    let gb = scenario.group(GroupId::B);
    let ns = (
        optimize_nonstrategic(ga).theta_star,
        optimize_nonstrategic(gb).theta_star,
    );
    let orig = (
        optimize(ga, PreferenceWeights::ORIGINAL).theta_star,
        optimize(gb, PreferenceWeights::ORIGINAL).theta_star,
    );
    let adj = (
        optimize(
            ga,
            PreferenceWeights::ORIGINAL.with_axis(axes.0, adjusted_weight),
        )
        .theta_star,
        optimize(
            gb,
            PreferenceWeights::ORIGINAL.with_axis(axes.1, adjusted_weight),
        )
        .theta_star,
    );
    vec![
        record(scenario, "non_strategic", ns.0, ns.1),
        record(scenario, "original_strategic", orig.0, orig.1),
        record(scenario, "adjusted_strategic", adj.0, adj.1),
    ]
}

/// Reproduces all three benchmark tables analytically (no sampling).
pub fn reproduce_gaussian_tables() -> Result<Vec<(String, Vec<TableRecord>)>, ModelError> {
    gaussian_settings()
        .iter()
        .map(|s| {
            let scenario = gaussian_scenario(s.alpha_a, s.alpha_b, s.q, s.eps)?;
            let rows = scenario_table(
                &scenario,
                (s.adjusted_axis, s.adjusted_axis),
                s.adjusted_weight,
            );
            Ok((s.name.to_string(), rows))
        })
        .collect()
}

/// Which rate the noise perturbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoisyParam {
    Q,
    Eps,
}

/// Per-round sweep outcome: utilities, manipulation probabilities,
/// unfairness.
type RoundRow = (f64, f64, f64, f64, f64);

/// Mean and standard deviation of the sweep quantities across noise rounds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseSweepRecord {
    pub k: f64,
    pub util_a_mean: f64,
    pub util_a_std: f64,
    pub util_b_mean: f64,
    pub util_b_std: f64,
    pub pm_a_mean: f64,
    pub pm_a_std: f64,
    pub pm_b_mean: f64,
    pub pm_b_std: f64,
    pub unfairness_mean: f64,
    pub unfairness_std: f64,
}

/// Repeats the weight sweep under a noisy belief about `q` or `eps`.
///
/// Each round draws one zero-mean Gaussian perturbation, clamps the
/// perturbed rate into `[0,1]`, optimizes the thresholds under the perturbed
/// belief, and evaluates utility, manipulation, and unfairness under the
/// true model. Deterministic for a fixed seed; zero noise reproduces the
/// noiseless sweep in every round.
pub fn noise_sweep(
    scenario: &GroupScenario,
    param: NoisyParam,
    noise_std: f64,
    rounds: usize,
    seed: u64,
    axes: (WeightAxis, WeightAxis),
    grid: &[f64],
) -> Result<Vec<NoiseSweepRecord>, HarnessError> {
    if rounds == 0 {
        return Err(HarnessError::Config("noise sweep needs rounds >= 1".into()));
    }
    if !(noise_std >= 0.0) {
        return Err(HarnessError::Config(format!(
            "noise_std must be non-negative, got {noise_std}"
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut per_round: Vec<Vec<RoundRow>> = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let u: f64 = rng.random();
        let delta = if noise_std == 0.0 || u <= 0.0 || u >= 1.0 {
            0.0
        } else {
            noise_std * std_normal.inverse_cdf(u)
        };
        let believed = perturbed_scenario(scenario, param, delta)?;
        let rows: Vec<RoundRow> = fairness_sweep(&believed, axes, grid)
            .into_iter()
            .map(|r| {
                // thresholds chosen under the belief, outcomes under truth
                let ga = scenario.group(GroupId::A);
                let gb = scenario.group(GroupId::B);
                (
                    crate::policy::strategic_utility(ga, r.theta_a),
                    crate::policy::strategic_utility(gb, r.theta_b),
                    ga.manipulation_probability(r.theta_a),
                    gb.manipulation_probability(r.theta_b),
                    unfairness(scenario, r.theta_a, r.theta_b),
                )
            })
            .collect();
        per_round.push(rows);
    }
    Ok(grid
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let series: Vec<RoundRow> = per_round.iter().map(|r| r[i]).collect();
            let stat = |f: &dyn Fn(&RoundRow) -> f64| {
                let vals: Vec<f64> = series.iter().map(f).collect();
                mean_std(&vals)
            };
            let (ua, ua_s) = stat(&|r| r.0);
            let (ub, ub_s) = stat(&|r| r.1);
            let (pa, pa_s) = stat(&|r| r.2);
            let (pb, pb_s) = stat(&|r| r.3);
            let (un, un_s) = stat(&|r| r.4);
            NoiseSweepRecord {
                k,
                util_a_mean: ua,
                util_a_std: ua_s,
                util_b_mean: ub,
                util_b_std: ub_s,
                pm_a_mean: pa,
                pm_a_std: pa_s,
                pm_b_mean: pb,
                pm_b_std: pb_s,
                unfairness_mean: un,
                unfairness_std: un_s,
            }
        })
        .collect())
}

fn perturbed_scenario(
    scenario: &GroupScenario,
    param: NoisyParam,
    delta: f64,
) -> Result<GroupScenario, HarnessError> {
    let perturb = |m: &crate::response::PopulationModel| {
        let (q, eps) = match param {
            NoisyParam::Q => ((m.q() + delta).clamp(0.0, 1.0), m.eps()),
            NoisyParam::Eps => (m.q(), (m.eps() + delta).clamp(0.0, 1.0)),
        };
        m.with_rates(q, eps)
    };
    let ga = perturb(scenario.group(GroupId::A)).map_err(HarnessError::Model)?;
    let gb = perturb(scenario.group(GroupId::B)).map_err(HarnessError::Model)?;
    GroupScenario::new(
        (scenario.name(GroupId::A).to_string(), ga),
        (scenario.name(GroupId::B).to_string(), gb),
        scenario.metric(),
    )
    .map_err(HarnessError::Model)
}

fn mean_std(vals: &[f64]) -> (f64, f64) {
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}
