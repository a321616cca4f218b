//! Two-group scenarios: the unfairness measure, advantaged-group
//! identification, incentive-condition checks, and the adjustment planner
//! that picks which preference weight to raise per group.

use serde::{Deserialize, Serialize};

use crate::dist::FeatureDistribution;
use crate::error::ModelError;
use crate::policy::{optimize, optimize_nonstrategic, PreferenceWeights, WeightAxis};
use crate::response::{PopulationModel, ResponseRegime};

/// Group fairness notion: equal opportunity compares qualified-conditioned
/// acceptance rates, demographic parity overall acceptance rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FairnessMetric {
    EqOpt,
    Dp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupId {
    A,
    B,
}

/// Two named populations plus the fairness metric used to compare them.
#[derive(Debug, Clone)]
pub struct GroupScenario {
    name_a: String,
    name_b: String,
    group_a: PopulationModel,
    group_b: PopulationModel,
    metric: FairnessMetric,
}

impl GroupScenario {
    pub fn new(
        group_a: (String, PopulationModel),
        group_b: (String, PopulationModel),
        metric: FairnessMetric,
    ) -> Result<Self, ModelError> {
        let ua = group_a.1.unit_utility();
        let ub = group_b.1.unit_utility();
        if (ua - ub).abs() > 1e-12 {
            return Err(ModelError::NonPositiveUtility(ub));
        }
        Ok(Self {
            name_a: group_a.0,
            name_b: group_b.0,
            group_a: group_a.1,
            group_b: group_b.1,
            metric,
        })
    }

    pub fn group(&self, id: GroupId) -> &PopulationModel {
        match id {
            GroupId::A => &self.group_a,
            GroupId::B => &self.group_b,
        }
    }

    pub fn name(&self, id: GroupId) -> &str {
        match id {
            GroupId::A => &self.name_a,
            GroupId::B => &self.name_b,
        }
    }

    pub fn metric(&self) -> FairnessMetric {
        self.metric
    }
}

/// The distribution whose tail mass the fairness measure compares: the
/// qualified feature law under equal opportunity, the population mixture
/// under demographic parity.
pub fn fairness_reference(model: &PopulationModel, metric: FairnessMetric) -> FeatureDistribution {
    match metric {
        FairnessMetric::EqOpt => model.p1().clone(),
        FairnessMetric::Dp => {
            FeatureDistribution::mixture(model.alpha(), model.p1().clone(), model.p0().clone())
                .expect("alpha validated by the model")
        }
    }
}

/// Absolute difference of reference tail masses at the two thresholds.
pub fn unfairness(scenario: &GroupScenario, theta_a: f64, theta_b: f64) -> f64 {
    let ra = fairness_reference(&scenario.group_a, scenario.metric);
    let rb = fairness_reference(&scenario.group_b, scenario.metric);
    ((1.0 - ra.cdf(theta_a)) - (1.0 - rb.cdf(theta_b))).abs()
}

#[derive(Debug, Clone, Copy)]
pub struct AdvantagedReport {
    pub advantaged: GroupId,
    pub tie: bool,
    pub tail_a: f64,
    pub tail_b: f64,
    pub theta_hat_a: f64,
    pub theta_hat_b: f64,
}

/// The advantaged group is the one with the larger reference tail mass at its
/// own non-strategic optimum. Exact ties resolve to group A with the tie
/// flag set.
pub fn advantaged_group(scenario: &GroupScenario) -> AdvantagedReport {
    let ta = optimize_nonstrategic(&scenario.group_a).theta_star;
    let tb = optimize_nonstrategic(&scenario.group_b).theta_star;
    let tail_a = 1.0 - fairness_reference(&scenario.group_a, scenario.metric).cdf(ta);
    let tail_b = 1.0 - fairness_reference(&scenario.group_b, scenario.metric).cdf(tb);
    let tie = (tail_a - tail_b).abs() <= 1e-12;
    AdvantagedReport {
        advantaged: if tie || tail_a > tail_b {
            GroupId::A
        } else {
            GroupId::B
        },
        tie,
        tail_a,
        tail_b,
        theta_hat_a: ta,
        theta_hat_b: tb,
    }
}

/// Incentive-condition booleans for one group, all evaluated at that group's
/// own strategic and non-strategic optima.
#[derive(Debug, Clone, Copy)]
pub struct GroupConditions {
    pub regime: ResponseRegime,
    pub theta_star: f64,
    pub theta_hat: f64,
    /// `q + eps >= 1`.
    pub cond_1i: bool,
    /// Density ratio at the strategic optimum at most `(1-q)/(1-q-eps)`,
    /// i.e. the optimum sits left of the manipulation peak.
    pub cond_1ii: bool,
    /// `q + eps < 1` and `alpha < 0.5`.
    pub cond_2i: bool,
    /// Ratio above the bound and the non-strategic manipulation probability
    /// above the median of the cost difference.
    pub cond_2ii: bool,
}

impl GroupConditions {
    pub fn condition1(&self) -> bool {
        self.cond_1i || self.cond_1ii
    }
    pub fn condition2(&self) -> bool {
        self.cond_2i && self.cond_2ii
    }
}

/// Which of the three guaranteed adjustment scenarios applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdjustmentScenario {
    RaiseK1Both,
    RaiseK2Both,
    RaiseK1AdvantagedK2Disadvantaged,
}

#[derive(Debug, Clone, Copy)]
pub struct ConditionReport {
    pub group_a: GroupConditions,
    pub group_b: GroupConditions,
    pub advantaged: GroupId,
    pub tie: bool,
    pub scenario: Option<AdjustmentScenario>,
}

fn group_conditions(model: &PopulationModel) -> GroupConditions {
    let theta_star = optimize(model, PreferenceWeights::ORIGINAL).theta_star;
    let theta_hat = optimize_nonstrategic(model).theta_star;
    let (q, eps) = (model.q(), model.eps());
    let cond_1i = q + eps >= 1.0;
    let (cond_1ii, cond_2ratio) = if cond_1i {
        (false, false)
    } else {
        let bound = (1.0 - q) / (1.0 - q - eps);
        let ratio = (model.p1().ln_pdf(theta_star) - model.p_improved().ln_pdf(theta_star)).exp();
        (ratio <= bound, ratio > bound)
    };
    let cond_2i = !cond_1i && model.alpha() < 0.5;
    let cond_2ii =
        cond_2ratio && model.manipulation_probability(theta_hat) > model.cost_diff().cdf(0.0);
    GroupConditions {
        regime: model.response_regime(),
        theta_star,
        theta_hat,
        cond_1i,
        cond_1ii,
        cond_2i,
        cond_2ii,
    }
}

/// Evaluates the incentive conditions per group and recommends the
/// adjustment scenario that is guaranteed to disincentivize manipulation and
/// promote fairness simultaneously, when one exists.
pub fn check_incentive_conditions(scenario: &GroupScenario) -> ConditionReport {
    let ga = group_conditions(&scenario.group_a);
    let gb = group_conditions(&scenario.group_b);
    let adv = advantaged_group(scenario);
    let (adv_cond, dis_cond) = match adv.advantaged {
        GroupId::A => (&ga, &gb),
        GroupId::B => (&gb, &ga),
    };
    let scenario_kind = if ga.condition1() && gb.condition1() {
        Some(AdjustmentScenario::RaiseK1Both)
    } else if ga.condition2() && gb.condition2() {
        Some(AdjustmentScenario::RaiseK2Both)
    } else if adv_cond.condition1() && dis_cond.condition2() {
        Some(AdjustmentScenario::RaiseK1AdvantagedK2Disadvantaged)
    } else {
        None
    };
    ConditionReport {
        group_a: ga,
        group_b: gb,
        advantaged: adv.advantaged,
        tie: adv.tie,
        scenario: scenario_kind,
    }
}

/// Per-group weight assignment produced by [`plan_adjustment`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdjustmentPlan {
    Guaranteed {
        weight_a: WeightAxis,
        weight_b: WeightAxis,
        scenario: AdjustmentScenario,
    },
    NotGuaranteed,
}

/// Maps the recommended scenario onto per-group weights; no plan is invented
/// when none of the guaranteed scenarios holds.
pub fn plan_adjustment(scenario: &GroupScenario) -> AdjustmentPlan {
    let report = check_incentive_conditions(scenario);
    match report.scenario {
        Some(AdjustmentScenario::RaiseK1Both) => AdjustmentPlan::Guaranteed {
            weight_a: WeightAxis::K1,
            weight_b: WeightAxis::K1,
            scenario: AdjustmentScenario::RaiseK1Both,
        },
        Some(AdjustmentScenario::RaiseK2Both) => AdjustmentPlan::Guaranteed {
            weight_a: WeightAxis::K2,
            weight_b: WeightAxis::K2,
            scenario: AdjustmentScenario::RaiseK2Both,
        },
        Some(AdjustmentScenario::RaiseK1AdvantagedK2Disadvantaged) => {
            let (weight_a, weight_b) = match report.advantaged {
                GroupId::A => (WeightAxis::K1, WeightAxis::K2),
                GroupId::B => (WeightAxis::K2, WeightAxis::K1),
            };
            AdjustmentPlan::Guaranteed {
                weight_a,
                weight_b,
                scenario: AdjustmentScenario::RaiseK1AdvantagedK2Disadvantaged,
            }
        }
        None => AdjustmentPlan::NotGuaranteed,
    }
}

/// One grid row of a two-group weight sweep.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FairnessSweepRecord {
    pub k: f64,
    pub theta_a: f64,
    pub theta_b: f64,
    pub util_a: f64,
    pub util_b: f64,
    pub pm_a: f64,
    pub pm_b: f64,
    pub unfairness: f64,
}

/// Sweeps the planned per-group weights over `grid`, optimizing each group
/// independently at every grid value.
pub fn fairness_sweep(
    scenario: &GroupScenario,
    weights: (WeightAxis, WeightAxis),
    grid: &[f64],
) -> Vec<FairnessSweepRecord> {
    grid.iter()
        .map(|&k| {
            let ra = optimize(
                &scenario.group_a,
                PreferenceWeights::ORIGINAL.with_axis(weights.0, k),
            );
            let rb = optimize(
                &scenario.group_b,
                PreferenceWeights::ORIGINAL.with_axis(weights.1, k),
            );
            FairnessSweepRecord {
                k,
                theta_a: ra.theta_star,
                theta_b: rb.theta_star,
                util_a: ra.actual_utility,
                util_b: rb.actual_utility,
                pm_a: scenario.group_a.manipulation_probability(ra.theta_star),
                pm_b: scenario.group_b.manipulation_probability(rb.theta_star),
                unfairness: unfairness(scenario, ra.theta_star, rb.theta_star),
            }
        })
        .collect()
}
