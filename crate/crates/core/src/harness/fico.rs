//! Ingestion of preprocessed credit-score tables.
//!
//! The input gives, per group and per score on an ascending grid, the score
//! cdf `F(x|s)` and the qualification likelihood `P(Y=1|x,s)`, plus a
//! per-group qualification rate sidecar. Conditional score distributions are
//! recovered by accumulating likelihood-weighted cdf increments and fitting
//! Beta shapes to the result.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dist::{fit_beta, CostDiffDistribution, FeatureDistribution};
use crate::fairness::{FairnessMetric, GroupScenario};
use crate::response::PopulationSpec;

use super::HarnessError;

#[derive(Debug, Deserialize)]
struct FicoRow {
    score: f64,
    group: String,
    cdf: f64,
    p_qualified: f64,
}

#[derive(Debug, Deserialize)]
struct AlphaRow {
    group: String,
    alpha: f64,
}

/// One group's score table.
#[derive(Debug, Clone)]
pub struct GroupTable {
    pub scores: Vec<f64>,
    pub cdf: Vec<f64>,
    pub p_qualified: Vec<f64>,
    pub alpha: f64,
}

/// Parsed input: group name to table, in name order.
#[derive(Debug, Clone)]
pub struct FicoInput {
    pub groups: BTreeMap<String, GroupTable>,
}

fn bad(path: &Path, msg: String) -> HarnessError {
    HarnessError::Csv(path.display().to_string(), msg)
}

/// Loads the `score,group,cdf,p_qualified` table and the `group,alpha`
/// sidecar, validating monotonicity and ranges per group.
pub fn load_fico(data: &Path, alphas: &Path) -> Result<FicoInput, HarnessError> {
    let mut reader = csv::Reader::from_path(data).map_err(|e| bad(data, e.to_string()))?;
    let mut groups: BTreeMap<String, GroupTable> = BTreeMap::new();
    for (i, row) in reader.deserialize::<FicoRow>().enumerate() {
        let row = row.map_err(|e| bad(data, format!("row {}: {e}", i + 2)))?;
        if !(0.0..=1.0).contains(&row.score) {
            return Err(bad(
                data,
                format!("row {}: score {} outside [0,1]", i + 2, row.score),
            ));
        }
        if !(0.0..=1.0).contains(&row.p_qualified) {
            return Err(bad(
                data,
                format!(
                    "row {}: p_qualified {} outside [0,1]",
                    i + 2,
                    row.p_qualified
                ),
            ));
        }
        if !(0.0..=1.0).contains(&row.cdf) {
            return Err(bad(
                data,
                format!("row {}: cdf {} outside [0,1]", i + 2, row.cdf),
            ));
        }
        let entry = groups
            .entry(row.group.clone())
            .or_insert_with(|| GroupTable {
                scores: Vec::new(),
                cdf: Vec::new(),
                p_qualified: Vec::new(),
                alpha: f64::NAN,
            });
        if let Some(&last) = entry.scores.last() {
            if row.score <= last {
                return Err(bad(
                    data,
                    format!(
                        "row {}: scores must ascend within group {}",
                        i + 2,
                        row.group
                    ),
                ));
            }
        }
        if let Some(&last) = entry.cdf.last() {
            if row.cdf < last - 1e-9 {
                return Err(bad(
                    data,
                    format!(
                        "row {}: cdf must be non-decreasing in group {}",
                        i + 2,
                        row.group
                    ),
                ));
            }
        }
        entry.scores.push(row.score);
        entry.cdf.push(row.cdf);
        entry.p_qualified.push(row.p_qualified);
    }
    if groups.is_empty() {
        return Err(bad(data, "no rows".into()));
    }

    let mut alpha_reader =
        csv::Reader::from_path(alphas).map_err(|e| bad(alphas, e.to_string()))?;
    for (i, row) in alpha_reader.deserialize::<AlphaRow>().enumerate() {
        let row = row.map_err(|e| bad(alphas, format!("row {}: {e}", i + 2)))?;
        let entry = groups
            .get_mut(&row.group)
            .ok_or_else(|| bad(alphas, format!("alpha for unknown group {}", row.group)))?;
        entry.alpha = row.alpha;
    }
    for (name, table) in &groups {
        if table.alpha.is_nan() {
            return Err(bad(alphas, format!("missing alpha for group {name}")));
        }
        if table.scores.len() < 3 {
            return Err(bad(data, format!("group {name} has fewer than 3 rows")));
        }
    }
    Ok(FicoInput { groups })
}

/// Fitted Beta shapes for one ingested group.
#[derive(Debug, Clone, Serialize)]
pub struct IngestedGroup {
    pub alpha: f64,
    pub p1: (f64, f64),
    pub p0: (f64, f64),
    pub p_improved: (f64, f64),
}

/// Summary of an ingestion run, serializable to JSON.
#[derive(Debug, Clone, Serialize)]
pub struct IngestSummary {
    pub groups: BTreeMap<String, IngestedGroup>,
}

/// Conditional cdf points for one label: cumulative likelihood-weighted cdf
/// increments, normalized to end at 1.
fn conditional_points(table: &GroupTable, qualified: bool) -> Vec<(f64, f64)> {
    let n = table.scores.len();
    let mut cum = Vec::with_capacity(n);
    let mut acc = 0.0;
    let mut prev_cdf = 0.0;
    for i in 0..n {
        let mass = table.cdf[i] - prev_cdf;
        prev_cdf = table.cdf[i];
        let w = if qualified {
            table.p_qualified[i]
        } else {
            1.0 - table.p_qualified[i]
        };
        acc += w * mass;
        cum.push(acc);
    }
    let total = acc.max(1e-12);
    table
        .scores
        .iter()
        .zip(cum.iter())
        .map(|(&x, &c)| (x, c / total))
        .collect()
}

/// Builds a two-group scenario from an ingested table: Beta fits for the
/// conditional distributions, the midpoint rule for the post-improvement
/// distribution, and the given behavioral rates and cost law for both
/// groups. The input must contain exactly two groups.
pub fn ingest_fico(
    input: &FicoInput,
    q: f64,
    eps: f64,
    u: f64,
    cost_diff: &CostDiffDistribution,
    metric: FairnessMetric,
) -> Result<(GroupScenario, IngestSummary), HarnessError> {
    if input.groups.len() != 2 {
        return Err(HarnessError::Config(format!(
            "ingestion needs exactly two groups, got {}",
            input.groups.len()
        )));
    }
    let mut summary = BTreeMap::new();
    let mut built = Vec::with_capacity(2);
    for (name, table) in &input.groups {
        let fit1 = fit_beta(&conditional_points(table, true))
            .map_err(|e| HarnessError::Config(format!("group {name}, qualified fit: {e}")))?;
        let fit0 = fit_beta(&conditional_points(table, false))
            .map_err(|e| HarnessError::Config(format!("group {name}, unqualified fit: {e}")))?;
        let improved = (0.5 * (fit1.a + fit0.a), 0.5 * (fit1.b + fit0.b));
        let model = PopulationSpec {
            alpha: table.alpha,
            p1: FeatureDistribution::beta(fit1.a, fit1.b)
                .map_err(crate::error::ModelError::Dist)?,
            p0: FeatureDistribution::beta(fit0.a, fit0.b)
                .map_err(crate::error::ModelError::Dist)?,
            p_improved: FeatureDistribution::beta(improved.0, improved.1)
                .map_err(crate::error::ModelError::Dist)?,
            cost_diff: cost_diff.clone(),
            q,
            eps,
            u,
            theta_bounds: None,
        }
        .build()
        .map_err(HarnessError::Model)?;
        summary.insert(
            name.clone(),
            IngestedGroup {
                alpha: table.alpha,
                p1: (fit1.a, fit1.b),
                p0: (fit0.a, fit0.b),
                p_improved: improved,
            },
        );
        built.push((name.clone(), model));
    }
    let group_b = built.pop().unwrap();
    let group_a = built.pop().unwrap();
    let scenario = GroupScenario::new(group_a, group_b, metric).map_err(HarnessError::Model)?;
    Ok((scenario, IngestSummary { groups: summary }))
}
