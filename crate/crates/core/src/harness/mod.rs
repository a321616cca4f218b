//! Config-driven experiment runner behind the command-line interface.

pub mod config;
pub mod fico;
pub mod io;
pub mod tables;

use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::error::{DistError, EstimationError, ModelError};
use crate::estimation::{run_estimation_pipeline, PipelineConfig};
use crate::fairness::{fairness_sweep, plan_adjustment, AdjustmentPlan};
use crate::policy::{
    optimize, optimize_nonstrategic, sweep_weights, PreferenceWeights, WeightAxis,
};

pub use config::{ExperimentConfig, Task};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("{0}: {1}")]
    Csv(String, String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
}

impl HarnessError {
    /// Process exit status: 2 for configuration and validation problems,
    /// 3 for numerical ill-posedness.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Estimation(EstimationError::IllPosed(_)) => 3,
            HarnessError::Dist(DistError::RankDeficient(_)) => 3,
            _ => 2,
        }
    }
}

/// Loads the config and dispatches one task; returns a one-line summary.
pub fn run(config_path: &Path, task: Option<Task>) -> Result<String, HarnessError> {
    let config = ExperimentConfig::load(config_path)?;
    let base = config_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let task = task.or(config.task).ok_or_else(|| {
        HarnessError::Config("no task given on the command line or in the config".into())
    })?;
    run_task(&config, task, &base)
}

#[derive(Debug, Serialize)]
struct OptimizeSummary {
    theta_star: f64,
    objective_value: f64,
    actual_utility: f64,
    p_manip: f64,
    at_boundary: bool,
    evaluations: usize,
    theta_hat: f64,
}

pub fn run_task(
    config: &ExperimentConfig,
    task: Task,
    base: &Path,
) -> Result<String, HarnessError> {
    match task {
        Task::Optimize => {
            let section = config.optimize.clone().unwrap_or(config::OptimizeConfig {
                group: None,
                k1: 1.0,
                k2: 1.0,
                k3: 1.0,
                output: None,
            });
            let model = config
                .scenario_required()?
                .group(section.group.as_deref(), base)?;
            let weights = PreferenceWeights::new(section.k1, section.k2, section.k3)
                .map_err(HarnessError::Model)?;
            let r = optimize(&model, weights);
            let summary = OptimizeSummary {
                theta_star: r.theta_star,
                objective_value: r.objective_value,
                actual_utility: r.actual_utility,
                p_manip: model.manipulation_probability(r.theta_star),
                at_boundary: r.at_boundary,
                evaluations: r.evaluations,
                theta_hat: optimize_nonstrategic(&model).theta_star,
            };
            if let Some(out) = &section.output {
                io::write_json(&base.join(out), &summary)?;
            }
            Ok(format!(
                "optimize: theta*={:.6} utility={:.6} p_manip={:.4}",
                summary.theta_star, summary.actual_utility, summary.p_manip
            ))
        }
        Task::Sweep => {
            let section = config
                .sweep
                .as_ref()
                .ok_or_else(|| HarnessError::Config("missing [sweep] section".into()))?;
            if section.grid.is_empty() || section.grid.iter().any(|&k| !(k >= 0.0)) {
                return Err(HarnessError::Config(
                    "sweep grid must be non-empty with non-negative values".into(),
                ));
            }
            let model = config
                .scenario_required()?
                .group(section.group.as_deref(), base)?;
            let records = sweep_weights(&model, section.axis, &section.grid);
            let out = base.join(&section.output);
            io::write_csv(&out, &records)?;
            Ok(format!(
                "sweep: {} values of {} -> {}",
                records.len(),
                section.axis,
                out.display()
            ))
        }
        Task::Fairness => {
            let section = config
                .fairness
                .as_ref()
                .ok_or_else(|| HarnessError::Config("missing [fairness] section".into()))?;
            let scenario = config.scenario_required()?.scenario(base)?;
            let axes = resolve_axes(&scenario, section.axis_a, section.axis_b)?;
            let records = fairness_sweep(&scenario, axes, &section.grid);
            let out = base.join(&section.output);
            io::write_csv(&out, &records)?;
            Ok(format!(
                "fairness: axes ({}, {}), {} grid values -> {}",
                axes.0,
                axes.1,
                records.len(),
                out.display()
            ))
        }
        Task::Estimate => {
            let section = config
                .estimate
                .as_ref()
                .ok_or_else(|| HarnessError::Config("missing [estimate] section".into()))?;
            let model = config
                .scenario_required()?
                .group(section.group.as_deref(), base)?;
            let mut pipeline =
                PipelineConfig::default_for(&model, section.sample_size, config.seed);
            if let Some(probes) = &section.probe_thetas {
                pipeline.probe_thetas = probes.clone();
            }
            if let Some(family) = section.family {
                pipeline.family = family.into();
            }
            let report = run_estimation_pipeline(&model, &pipeline)?;
            let out = base.join(&section.output);
            io::write_json(&out, &report)?;
            Ok(format!(
                "estimate: q_err={:.4} eps_err={:.4} -> {}",
                report.q.abs_error,
                report.epsilon.abs_error,
                out.display()
            ))
        }
        Task::ReproduceTables => {
            let section =
                config
                    .reproduce_tables
                    .clone()
                    .unwrap_or(config::ReproduceTablesConfig {
                        output_dir: PathBuf::from("tables"),
                    });
            let dir = base.join(&section.output_dir);
            let tables = tables::reproduce_gaussian_tables().map_err(HarnessError::Model)?;
            let mut written = Vec::new();
            for (name, rows) in &tables {
                let path = dir.join(format!("gaussian_{name}.csv"));
                io::write_csv(&path, rows)?;
                written.push(path.display().to_string());
            }
            Ok(format!("reproduce-tables: wrote {}", written.join(", ")))
        }
        Task::NoiseSweep => {
            let section = config
                .noise_sweep
                .as_ref()
                .ok_or_else(|| HarnessError::Config("missing [noise_sweep] section".into()))?;
            let scenario = config.scenario_required()?.scenario(base)?;
            let axes = resolve_axes(&scenario, section.axis_a, section.axis_b)?;
            let records = tables::noise_sweep(
                &scenario,
                section.param,
                section.noise_std,
                section.rounds,
                config.seed,
                axes,
                &section.grid,
            )?;
            let out = base.join(&section.output);
            io::write_csv(&out, &records)?;
            Ok(format!(
                "noise-sweep: {:?} std={} rounds={} -> {}",
                section.param,
                section.noise_std,
                section.rounds,
                out.display()
            ))
        }
        Task::IngestFico => {
            let section = config
                .ingest_fico
                .as_ref()
                .ok_or_else(|| HarnessError::Config("missing [ingest_fico] section".into()))?;
            let input = fico::load_fico(&base.join(&section.data), &base.join(&section.alphas))?;
            let cost = match &section.cost_diff {
                config::DistSpec::Gaussian { mean, std } => {
                    crate::dist::CostDiffDistribution::gaussian(*mean, *std)
                        .map_err(HarnessError::Dist)?
                }
                other => {
                    return Err(HarnessError::Config(format!(
                        "ingest cost_diff must be gaussian, got {other:?}"
                    )))
                }
            };
            let (_, summary) = fico::ingest_fico(
                &input,
                section.q,
                section.eps,
                section.u,
                &cost,
                section.metric,
            )?;
            let out = base.join(&section.output);
            io::write_json(&out, &summary)?;
            Ok(format!(
                "ingest-fico: {} groups -> {}",
                summary.groups.len(),
                out.display()
            ))
        }
    }
}

/// Uses explicit axes when given, otherwise asks the adjustment planner.
fn resolve_axes(
    scenario: &crate::fairness::GroupScenario,
    axis_a: Option<WeightAxis>,
    axis_b: Option<WeightAxis>,
) -> Result<(WeightAxis, WeightAxis), HarnessError> {
    match (axis_a, axis_b) {
        (Some(a), Some(b)) => Ok((a, b)),
        (None, None) => match plan_adjustment(scenario) {
            AdjustmentPlan::Guaranteed {
                weight_a, weight_b, ..
            } => Ok((weight_a, weight_b)),
            AdjustmentPlan::NotGuaranteed => Err(HarnessError::Config(
                "no guaranteed adjustment plan for this scenario; set axis_a and axis_b".into(),
            )),
        },
        _ => Err(HarnessError::Config(
            "set both axis_a and axis_b, or neither".into(),
        )),
    }
}
