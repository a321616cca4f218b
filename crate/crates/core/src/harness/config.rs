//! Experiment configuration: a strict TOML document. Unknown keys are
//! rejected everywhere.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dist::{CostDiffDistribution, FeatureDistribution};
use crate::estimation::FitFamily;
use crate::fairness::{FairnessMetric, GroupScenario};
use crate::policy::WeightAxis;
use crate::response::{PopulationModel, PopulationSpec};

use super::io::load_empirical_csv;
use super::tables::NoisyParam;
use super::HarnessError;

/// Task selector, also usable as the `task` key for `run`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Optimize,
    Sweep,
    Fairness,
    Estimate,
    ReproduceTables,
    NoiseSweep,
    IngestFico,
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Task::Optimize => "optimize",
            Task::Sweep => "sweep",
            Task::Fairness => "fairness",
            Task::Estimate => "estimate",
            Task::ReproduceTables => "reproduce-tables",
            Task::NoiseSweep => "noise-sweep",
            Task::IngestFico => "ingest-fico",
        })
    }
}

/// A distribution in the config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum DistSpec {
    Gaussian {
        mean: f64,
        std: f64,
    },
    Beta {
        a: f64,
        b: f64,
    },
    /// Path (relative to the config file) of a `x,cdf` CSV.
    Empirical {
        path: PathBuf,
    },
}

impl DistSpec {
    pub fn build(&self, base: &Path) -> Result<FeatureDistribution, HarnessError> {
        match self {
            DistSpec::Gaussian { mean, std } => {
                FeatureDistribution::gaussian(*mean, *std).map_err(HarnessError::Dist)
            }
            DistSpec::Beta { a, b } => {
                FeatureDistribution::beta(*a, *b).map_err(HarnessError::Dist)
            }
            DistSpec::Empirical { path } => {
                load_empirical_csv(&base.join(path)).map_err(HarnessError::Dist)
            }
        }
    }

    fn build_cost(&self, base: &Path) -> Result<CostDiffDistribution, HarnessError> {
        match self {
            DistSpec::Gaussian { mean, std } => {
                CostDiffDistribution::gaussian(*mean, *std).map_err(HarnessError::Dist)
            }
            DistSpec::Empirical { path } => {
                let FeatureDistribution::EmpiricalGrid(grid) =
                    load_empirical_csv(&base.join(path)).map_err(HarnessError::Dist)?
                else {
                    unreachable!("csv loads as a grid")
                };
                CostDiffDistribution::empirical(grid.points().collect()).map_err(HarnessError::Dist)
            }
            DistSpec::Beta { .. } => Err(HarnessError::Config(
                "cost_diff supports gaussian or empirical variants".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    pub alpha: f64,
    pub q: f64,
    pub eps: f64,
    pub p1: DistSpec,
    pub p0: DistSpec,
    /// Optional; for Beta `p1`/`p0` the midpoint rule fills it in.
    #[serde(default)]
    pub p_improved: Option<DistSpec>,
    pub cost_diff: DistSpec,
    #[serde(default)]
    pub theta_bounds: Option<(f64, f64)>,
}

impl GroupConfig {
    pub fn build(&self, u: f64, base: &Path) -> Result<PopulationModel, HarnessError> {
        let p_improved = match (&self.p_improved, &self.p1, &self.p0) {
            (Some(spec), _, _) => spec.build(base)?,
            (None, DistSpec::Beta { a: a1, b: b1 }, DistSpec::Beta { a: a0, b: b0 }) => {
                FeatureDistribution::beta(0.5 * (a1 + a0), 0.5 * (b1 + b0))
                    .map_err(HarnessError::Dist)?
            }
            (None, _, _) => {
                return Err(HarnessError::Config(
                    "p_improved is required unless p1 and p0 are both beta".into(),
                ))
            }
        };
        PopulationSpec {
            alpha: self.alpha,
            p1: self.p1.build(base)?,
            p0: self.p0.build(base)?,
            p_improved,
            cost_diff: self.cost_diff.build_cost(base)?,
            q: self.q,
            eps: self.eps,
            u,
            theta_bounds: self.theta_bounds,
        }
        .build()
        .map_err(HarnessError::Model)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_u")]
    pub u: f64,
    #[serde(default = "default_metric")]
    pub metric: FairnessMetric,
    pub groups: BTreeMap<String, GroupConfig>,
}

fn default_u() -> f64 {
    1.0
}

fn default_metric() -> FairnessMetric {
    FairnessMetric::EqOpt
}

impl ScenarioConfig {
    pub fn group(&self, name: Option<&str>, base: &Path) -> Result<PopulationModel, HarnessError> {
        let (name, cfg) = match name {
            Some(n) => (
                n,
                self.groups
                    .get(n)
                    .ok_or_else(|| HarnessError::Config(format!("unknown group '{n}'")))?,
            ),
            None => {
                if self.groups.len() != 1 {
                    return Err(HarnessError::Config(
                        "group must be named when the scenario has several".into(),
                    ));
                }
                let (n, c) = self.groups.iter().next().unwrap();
                (n.as_str(), c)
            }
        };
        let _ = name;
        cfg.build(self.u, base)
    }

    /// Builds the two-group scenario; groups pair in name order.
    pub fn scenario(&self, base: &Path) -> Result<GroupScenario, HarnessError> {
        if self.groups.len() != 2 {
            return Err(HarnessError::Config(format!(
                "fairness tasks need exactly two groups, got {}",
                self.groups.len()
            )));
        }
        let mut it = self.groups.iter();
        let (na, ca) = it.next().unwrap();
        let (nb, cb) = it.next().unwrap();
        GroupScenario::new(
            (na.clone(), ca.build(self.u, base)?),
            (nb.clone(), cb.build(self.u, base)?),
            self.metric,
        )
        .map_err(HarnessError::Model)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default = "one")]
    pub k1: f64,
    #[serde(default = "one")]
    pub k2: f64,
    #[serde(default = "one")]
    pub k3: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub group: Option<String>,
    pub axis: WeightAxis,
    pub grid: Vec<f64>,
    pub output: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FairnessConfig {
    pub grid: Vec<f64>,
    /// Per-group weight axes; when absent the adjustment planner decides
    /// (an error if no guaranteed plan exists).
    #[serde(default)]
    pub axis_a: Option<WeightAxis>,
    #[serde(default)]
    pub axis_b: Option<WeightAxis>,
    pub output: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    #[serde(default)]
    pub group: Option<String>,
    pub sample_size: usize,
    #[serde(default)]
    pub probe_thetas: Option<Vec<f64>>,
    /// Declared family of the unknown components; defaults to the model's
    /// own feature family.
    #[serde(default)]
    pub family: Option<FitFamilyConfig>,
    pub output: PathBuf,
}

/// Serde-friendly mirror of [`FitFamily`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitFamilyConfig {
    Gaussian,
    Beta,
}

impl From<FitFamilyConfig> for FitFamily {
    fn from(f: FitFamilyConfig) -> Self {
        match f {
            FitFamilyConfig::Gaussian => FitFamily::Gaussian,
            FitFamilyConfig::Beta => FitFamily::Beta,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReproduceTablesConfig {
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSweepConfig {
    pub param: NoisyParam,
    pub noise_std: f64,
    pub rounds: usize,
    pub grid: Vec<f64>,
    #[serde(default)]
    pub axis_a: Option<WeightAxis>,
    #[serde(default)]
    pub axis_b: Option<WeightAxis>,
    pub output: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestFicoConfig {
    pub data: PathBuf,
    pub alphas: PathBuf,
    pub q: f64,
    pub eps: f64,
    #[serde(default = "default_u")]
    pub u: f64,
    pub cost_diff: DistSpec,
    #[serde(default = "default_metric")]
    pub metric: FairnessMetric,
    pub output: PathBuf,
}

/// Root configuration document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub task: Option<Task>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub scenario: Option<ScenarioConfig>,
    #[serde(default)]
    pub optimize: Option<OptimizeConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub fairness: Option<FairnessConfig>,
    #[serde(default)]
    pub estimate: Option<EstimateConfig>,
    #[serde(default)]
    pub reproduce_tables: Option<ReproduceTablesConfig>,
    #[serde(default)]
    pub noise_sweep: Option<NoiseSweepConfig>,
    #[serde(default)]
    pub ingest_fico: Option<IngestFicoConfig>,
}

fn default_seed() -> u64 {
    0
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Io(path.display().to_string(), e))?;
        toml::from_str(&text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn scenario_required(&self) -> Result<&ScenarioConfig, HarnessError> {
        self.scenario
            .as_ref()
            .ok_or_else(|| HarnessError::Config("missing [scenario] section".into()))
    }
}
