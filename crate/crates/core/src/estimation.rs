//! Controlled-experiment recovery of model parameters.
//!
//! Given only the qualified feature distribution and the qualification rate,
//! five intervention rounds recover, in order: the unqualified feature
//! distribution, the improvement success rate, the post-improvement
//! distribution, the detection rate, and the cost-difference law.

use serde::Serialize;

use crate::dist::{fit_beta, fit_gaussian_cdf, ks_statistic, FeatureDistribution};
use crate::error::{DistError, EstimationError};
use crate::oracle::{empirical_cdf, sample_population_mixture, simulate, SimOptions};
use crate::response::{net_gap_from, PopulationModel};

/// Parametric family assumed for an unmixed component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitFamily {
    Gaussian,
    Beta,
}

/// Number of grid points the residual-cdf fits use.
const UNMIX_GRID: usize = 200;

/// Goodness-of-fit flag threshold on the KS distance between the residual
/// cdf and the fitted family.
const GOF_KS_THRESHOLD: f64 = 0.05;

/// A fitted component: location/scale for Gaussian, shape pair for Beta.
#[derive(Debug, Clone, Serialize)]
pub struct FittedDistribution {
    pub family: FitFamily,
    pub params: (f64, f64),
    pub gof_ks: f64,
    pub gof_flagged: bool,
}

impl FittedDistribution {
    pub fn to_distribution(&self) -> Result<FeatureDistribution, DistError> {
        match self.family {
            FitFamily::Gaussian => FeatureDistribution::gaussian(self.params.0, self.params.1),
            FitFamily::Beta => FeatureDistribution::beta(self.params.0, self.params.1),
        }
    }
}

/// An estimate that may have been clamped into its valid range.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ClampedEstimate {
    pub value: f64,
    pub clamped: bool,
}

fn clamp_unit(raw: f64) -> ClampedEstimate {
    let value = raw.clamp(0.0, 1.0);
    ClampedEstimate {
        value,
        clamped: value != raw,
    }
}

/// Residual cdf of the unknown component on an evenly spaced grid:
/// `(F_mix - w_known F_known) / w_unknown`, clamped into `[0,1]`.
///
/// A decreasing residual signals a mis-specified mixture. The rejection
/// tolerance is 1e-2, widened to the sampling-noise scale `3 / sqrt(n)` for
/// small samples so that noisy-but-consistent inputs still fit.
fn unmix_residual(
    samples: &[f64],
    known: &FeatureDistribution,
    w_known: f64,
    w_unknown: f64,
) -> Result<Vec<(f64, f64)>, EstimationError> {
    if w_unknown <= 1e-9 {
        return Err(EstimationError::IllPosed(format!(
            "unknown component has vanishing mixture weight {w_unknown}"
        )));
    }
    let tol = (1e-2f64).max(3.0 / (samples.len() as f64).sqrt()) / w_unknown;
    let mix = empirical_cdf(samples)?;
    let (lo, hi) = mix.support();
    let mut points = Vec::with_capacity(UNMIX_GRID);
    let mut prev = f64::NEG_INFINITY;
    for i in 0..UNMIX_GRID {
        let x = lo + (hi - lo) * i as f64 / (UNMIX_GRID - 1) as f64;
        let raw = (mix.cdf(x) - w_known * known.cdf(x)) / w_unknown;
        if raw < prev - tol {
            return Err(EstimationError::IllPosed(format!(
                "residual cdf decreases by more than {tol:.3} near x = {x}"
            )));
        }
        prev = prev.max(raw);
        // keep the grid monotone for the downstream fit
        points.push((x, prev.clamp(0.0, 1.0)));
    }
    Ok(points)
}

fn fit_family(
    points: &[(f64, f64)],
    family: FitFamily,
) -> Result<FittedDistribution, EstimationError> {
    let (params, dist) = match family {
        FitFamily::Gaussian => {
            let f = fit_gaussian_cdf(points)?;
            let d = FeatureDistribution::gaussian(f.mean, f.std)?;
            ((f.mean, f.std), d)
        }
        FitFamily::Beta => {
            let pts: Vec<(f64, f64)> = points
                .iter()
                .map(|&(x, y)| (x.clamp(0.0, 1.0), y))
                .collect();
            let f = fit_beta(&pts)?;
            let d = FeatureDistribution::beta(f.a, f.b)?;
            ((f.a, f.b), d)
        }
    };
    let gof_ks = ks_statistic(points, |x| dist.cdf(x));
    Ok(FittedDistribution {
        family,
        params,
        gof_ks,
        gof_flagged: gof_ks > GOF_KS_THRESHOLD,
    })
}

/// Step 1: recover the unqualified feature distribution from pre-action
/// mixture samples `(1-alpha) p0 + alpha p1`.
pub fn estimate_p0(
    mixture_samples: &[f64],
    alpha: f64,
    p1: &FeatureDistribution,
    family: FitFamily,
) -> Result<FittedDistribution, EstimationError> {
    let residual = unmix_residual(mixture_samples, p1, alpha, 1.0 - alpha)?;
    fit_family(&residual, family)
}

/// Step 2: with manipulation disabled the post-round qualification rate is
/// `(1-alpha) q + alpha`; inverting gives `q`.
pub fn estimate_q(post_audit_rate: f64, alpha: f64) -> ClampedEstimate {
    clamp_unit((post_audit_rate - alpha) / (1.0 - alpha))
}

/// Step 3: recover the post-improvement distribution from post-round samples
/// `(1-alpha)(1-q) p_improved + [(1-alpha) q + alpha] p1`.
pub fn estimate_p_improved(
    post_threshold_samples: &[f64],
    alpha: f64,
    q: f64,
    p1: &FeatureDistribution,
    family: FitFamily,
) -> Result<FittedDistribution, EstimationError> {
    let w_known = (1.0 - alpha) * q + alpha;
    let w_unknown = (1.0 - alpha) * (1.0 - q);
    let residual = unmix_residual(post_threshold_samples, p1, w_known, w_unknown)?;
    fit_family(&residual, family)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EpsilonEstimate {
    pub epsilon: ClampedEstimate,
    pub p_manip: ClampedEstimate,
}

/// Step 4: the post-round qualification rate obeys
/// `rate = alpha + (1-alpha)(1 - P_M) q`; solving for `P_M` and dividing the
/// caught fraction (among unqualified actors) by it gives the detection rate.
pub fn estimate_epsilon(
    post_rate: f64,
    caught_fraction: f64,
    alpha: f64,
    q: f64,
) -> Result<EpsilonEstimate, EstimationError> {
    if q <= 1e-9 {
        return Err(EstimationError::IllPosed(
            "q = 0 leaves the qualification rate uninformative about P_M".into(),
        ));
    }
    let raw_pm = 1.0 - (post_rate - alpha) / ((1.0 - alpha) * q);
    if raw_pm <= 0.0 {
        return Err(EstimationError::IllPosed(format!(
            "implied manipulation probability {raw_pm} is not positive"
        )));
    }
    let p_manip = clamp_unit(raw_pm);
    let epsilon = clamp_unit(caught_fraction / p_manip.value);
    Ok(EpsilonEstimate { epsilon, p_manip })
}

/// Step 5: probe thresholds map to cost-difference cdf points through the
/// cost-free utility gap; fitting a Gaussian cdf through
/// `(gap(theta_j), P_M(theta_j))` recovers the cost-difference law.
pub fn estimate_cost_diff(
    probes: &[(f64, f64)],
    p1: &FeatureDistribution,
    p_improved: &FeatureDistribution,
    q: f64,
    eps: f64,
) -> Result<(f64, f64), EstimationError> {
    if probes.len() < 3 {
        return Err(EstimationError::TooFewProbes {
            need: 3,
            got: probes.len(),
        });
    }
    let points: Vec<(f64, f64)> = probes
        .iter()
        .map(|&(theta, pm)| (net_gap_from(p1, p_improved, q, eps, theta), pm))
        .collect();
    let fit = fit_gaussian_cdf(&points)?;
    Ok((fit.mean, fit.std))
}

/// One estimated parameter with its absolute error against ground truth.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ParameterEstimate {
    pub estimate: f64,
    pub truth: f64,
    pub abs_error: f64,
}

fn param(estimate: f64, truth: f64) -> ParameterEstimate {
    ParameterEstimate {
        estimate,
        truth,
        abs_error: (estimate - truth).abs(),
    }
}

/// Full pipeline report, serializable to JSON.
#[derive(Debug, Clone, Serialize)]
pub struct EstimationReport {
    pub sample_size: usize,
    pub seed: u64,
    pub p0_location: ParameterEstimate,
    pub p0_scale: ParameterEstimate,
    pub p0_gof_ks: f64,
    pub q: ParameterEstimate,
    pub q_clamped: bool,
    pub p_improved_location: ParameterEstimate,
    pub p_improved_scale: ParameterEstimate,
    pub p_improved_gof_ks: f64,
    pub epsilon: ParameterEstimate,
    pub epsilon_clamped: bool,
    pub cost_location: ParameterEstimate,
    pub cost_scale: ParameterEstimate,
    pub probe_thetas: Vec<f64>,
}

/// Pipeline configuration; `family` applies to both unmixing fits.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub sample_size: usize,
    pub seed: u64,
    pub probe_thetas: Vec<f64>,
    pub family: FitFamily,
}

impl PipelineConfig {
    /// Eight probes spread over the model's threshold interval; the fit
    /// family follows the ground-truth model's own family.
    pub fn default_for(model: &PopulationModel, sample_size: usize, seed: u64) -> Self {
        let (lo, hi) = model.theta_bounds();
        let probes = (0..8)
            .map(|i| lo + (hi - lo) * (0.1 + 0.75 * i as f64 / 7.0))
            .collect();
        let family = match model.p0() {
            FeatureDistribution::Beta { .. } => FitFamily::Beta,
            _ => FitFamily::Gaussian,
        };
        Self {
            sample_size,
            seed,
            probe_thetas: probes,
            family,
        }
    }
}

/// Ground-truth parameter pair (location/scale or shapes) for error
/// reporting.
fn true_params(dist: &FeatureDistribution) -> (f64, f64) {
    match dist {
        FeatureDistribution::Gaussian { mean, std, .. } => (*mean, *std),
        FeatureDistribution::Beta { a, b, .. } => (*a, *b),
        _ => (f64::NAN, f64::NAN),
    }
}

/// Runs intervention steps 1-5 against simulations of the ground-truth
/// model. Deterministic for a fixed seed.
pub fn run_estimation_pipeline(
    ground_truth: &PopulationModel,
    config: &PipelineConfig,
) -> Result<EstimationReport, EstimationError> {
    if config.probe_thetas.len() < 3 {
        return Err(EstimationError::TooFewProbes {
            need: 3,
            got: config.probe_thetas.len(),
        });
    }
    let n = config.sample_size;
    let alpha = ground_truth.alpha();
    let (lo, hi) = ground_truth.theta_bounds();
    let mid = 0.5 * (lo + hi);

    // step 1: lowest threshold, pre-action mixture
    let mixture: Vec<f64> = sample_population_mixture(ground_truth, n, config.seed)
        .into_iter()
        .map(|(x, _)| x)
        .collect();
    let p0_fit = estimate_p0(&mixture, alpha, ground_truth.p1(), config.family)?;

    // step 2: manipulation disabled, arbitrary threshold
    let audit = simulate(
        ground_truth,
        mid,
        n,
        config.seed.wrapping_add(1),
        SimOptions {
            manipulation_disabled: true,
            record_samples: true,
            ..Default::default()
        },
    );
    let q_hat = estimate_q(audit.post_qualification_rate, alpha);

    // step 3: same round's post-action features
    let post_features: Vec<f64> = audit
        .samples
        .as_ref()
        .expect("samples recorded")
        .iter()
        .map(|s| s.x)
        .collect();
    let pi_fit = estimate_p_improved(
        &post_features,
        alpha,
        q_hat.value,
        ground_truth.p1(),
        config.family,
    )?;

    // step 4: manipulation enabled at a probe threshold
    let probe = simulate(
        ground_truth,
        mid,
        n,
        config.seed.wrapping_add(2),
        SimOptions::default(),
    );
    let eps_est = estimate_epsilon(
        probe.post_qualification_rate,
        probe.caught_rate_unqualified,
        alpha,
        q_hat.value,
    )?;

    // step 5: manipulation frequencies across probe thresholds
    let pi_dist = pi_fit.to_distribution()?;
    let mut probes = Vec::with_capacity(config.probe_thetas.len());
    for (i, &theta) in config.probe_thetas.iter().enumerate() {
        let r = simulate(
            ground_truth,
            theta,
            n,
            config.seed.wrapping_add(3 + i as u64),
            SimOptions::default(),
        );
        probes.push((theta, r.manipulation_rate));
    }
    let (cost_mean, cost_std) = estimate_cost_diff(
        &probes,
        ground_truth.p1(),
        &pi_dist,
        q_hat.value,
        eps_est.epsilon.value,
    )?;

    let (p0_loc, p0_scale) = true_params(ground_truth.p0());
    let (pi_loc, pi_scale) = true_params(ground_truth.p_improved());
    let (cloc, cscale) = true_params(ground_truth.cost_diff().as_feature());
    Ok(EstimationReport {
        sample_size: n,
        seed: config.seed,
        p0_location: param(p0_fit.params.0, p0_loc),
        p0_scale: param(p0_fit.params.1, p0_scale),
        p0_gof_ks: p0_fit.gof_ks,
        q: param(q_hat.value, ground_truth.q()),
        q_clamped: q_hat.clamped,
        p_improved_location: param(pi_fit.params.0, pi_loc),
        p_improved_scale: param(pi_fit.params.1, pi_scale),
        p_improved_gof_ks: pi_fit.gof_ks,
        epsilon: param(eps_est.epsilon.value, ground_truth.eps()),
        epsilon_clamped: eps_est.epsilon.clamped,
        cost_location: param(cost_mean, cloc),
        cost_scale: param(cost_std, cscale),
        probe_thetas: config.probe_thetas.clone(),
    })
}
