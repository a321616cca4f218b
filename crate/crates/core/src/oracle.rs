//! Brute-force agent simulator used to validate every analytic quantity.
//!
//! Each agent is drawn through the full game: label, cost draw, action
//! choice, detection, improvement success, acceptance. The simulator never
//! calls the analytic manipulation probability or utility formulas; it only
//! shares the distribution cdf evaluations that define the agents' expected
//! utilities.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::dist::FeatureDistribution;
use crate::error::DistError;
use crate::response::PopulationModel;

/// Agents are simulated in fixed-size shards, each on its own ChaCha stream
/// derived from `(seed, shard index)`, so results are identical no matter
/// how shards are scheduled.
const SHARD: usize = 1 << 16;

#[derive(Debug, Clone, Copy, Default)]
pub struct SimOptions {
    /// Every manipulator is caught, regardless of the model's detection rate.
    pub audit_everyone: bool,
    /// Agents never manipulate; all unqualified individuals improve.
    pub manipulation_disabled: bool,
    /// Retain per-agent records in the result.
    pub record_samples: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentAction {
    None,
    Manipulate,
    Improve,
}

impl AgentAction {
    pub fn as_str(self) -> &'static str {
        match self {
            AgentAction::None => "none",
            AgentAction::Manipulate => "manipulate",
            AgentAction::Improve => "improve",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AgentSample {
    pub x: f64,
    pub final_label: bool,
    pub action: AgentAction,
    pub caught: bool,
    pub accepted: bool,
}

/// Aggregate outcome of one simulated round.
#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub n: usize,
    /// Fraction of unqualified agents who chose to manipulate.
    pub manipulation_rate: f64,
    /// Mean decision-maker reward per agent.
    pub mean_utility: f64,
    /// Fraction of agents whose final label is qualified.
    pub post_qualification_rate: f64,
    /// Caught manipulators as a fraction of unqualified agents.
    pub caught_rate_unqualified: f64,
    /// Caught manipulators as a fraction of the whole population.
    pub caught_rate_population: f64,
    /// Fraction of agents accepted.
    pub acceptance_rate: f64,
    pub samples: Option<Vec<AgentSample>>,
}

/// Strict preference for manipulation given the cost-free utility gap and the
/// realized cost difference; a tie resolves to improvement.
#[inline]
pub fn prefers_manipulation(net_gap: f64, cost_draw: f64) -> bool {
    net_gap > cost_draw
}

/// Runs `n` agents through the game at threshold `theta`.
pub fn simulate(
    model: &PopulationModel,
    theta: f64,
    n: usize,
    seed: u64,
    options: SimOptions,
) -> SimulationResult {
    let gap = model.net_gap(theta);
    let u = model.unit_utility();
    let mut utility_sum = 0.0;
    let mut unqualified = 0usize;
    let mut manipulators = 0usize;
    let mut caught_count = 0usize;
    let mut final_qualified = 0usize;
    let mut accepted_count = 0usize;
    let mut samples = options.record_samples.then(|| Vec::with_capacity(n));

    let shards = n.div_ceil(SHARD);
    for shard in 0..shards {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(shard as u64);
        let count = SHARD.min(n - shard * SHARD);
        for _ in 0..count {
            let qualified = rng.random::<f64>() < model.alpha();
            let (x, final_label, action, caught) = if qualified {
                (draw(model.p1(), &mut rng), true, AgentAction::None, false)
            } else {
                let cost = model.cost_diff().draw(&mut rng);
                let manipulate = !options.manipulation_disabled && prefers_manipulation(gap, cost);
                if manipulate {
                    let caught = options.audit_everyone || rng.random::<f64>() < model.eps();
                    let x = draw(model.p1(), &mut rng);
                    (x, false, AgentAction::Manipulate, caught)
                } else {
                    let success = rng.random::<f64>() < model.q();
                    let x = if success {
                        draw(model.p1(), &mut rng)
                    } else {
                        draw(model.p_improved(), &mut rng)
                    };
                    (x, success, AgentAction::Improve, false)
                }
            };
            let accepted = !caught && x >= theta;
            if accepted {
                utility_sum += if final_label { u } else { -u };
                accepted_count += 1;
            }
            if !qualified {
                unqualified += 1;
                if action == AgentAction::Manipulate {
                    manipulators += 1;
                }
                if caught {
                    caught_count += 1;
                }
            }
            if final_label {
                final_qualified += 1;
            }
            if let Some(buf) = samples.as_mut() {
                buf.push(AgentSample {
                    x,
                    final_label,
                    action,
                    caught,
                    accepted,
                });
            }
        }
    }

    let frac = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    SimulationResult {
        n,
        manipulation_rate: frac(manipulators, unqualified),
        mean_utility: utility_sum / n as f64,
        post_qualification_rate: frac(final_qualified, n),
        caught_rate_unqualified: frac(caught_count, unqualified),
        caught_rate_population: frac(caught_count, n),
        acceptance_rate: frac(accepted_count, n),
        samples,
    }
}

fn draw<R: Rng>(dist: &FeatureDistribution, rng: &mut R) -> f64 {
    dist.draw(rng)
}

/// Samples pre-action features: `(x, qualified)` pairs from the population
/// mixture `alpha p1 + (1 - alpha) p0`. This is what an intervention that
/// accepts everyone observes.
pub fn sample_population_mixture(model: &PopulationModel, n: usize, seed: u64) -> Vec<(f64, bool)> {
    let mut out = Vec::with_capacity(n);
    let shards = n.div_ceil(SHARD);
    for shard in 0..shards {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(shard as u64);
        let count = SHARD.min(n - shard * SHARD);
        for _ in 0..count {
            let qualified = rng.random::<f64>() < model.alpha();
            let x = if qualified {
                model.p1().draw(&mut rng)
            } else {
                model.p0().draw(&mut rng)
            };
            out.push((x, qualified));
        }
    }
    out
}

/// Builds an empirical-grid distribution from samples with the midpoint
/// convention `F(x_(i)) = (i + 1/2) / n`, extended by half a neighbor gap on
/// each side so the grid covers cdf 0 to 1.
pub fn empirical_cdf(samples: &[f64]) -> Result<FeatureDistribution, DistError> {
    if samples.len() < 2 {
        return Err(DistError::TooFewPoints {
            need: 2,
            got: samples.len(),
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if !sorted[0].is_finite() || !sorted[sorted.len() - 1].is_finite() {
        return Err(DistError::InvalidParameter("non-finite sample".into()));
    }
    let n = sorted.len();
    // merge ties, averaging their midpoint ranks
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(n + 2);
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let rank = 0.5 * (i + j) as f64 + 0.5;
        points.push((sorted[i], rank / n as f64));
        i = j + 1;
    }
    if points.len() < 2 {
        return Err(DistError::InvalidParameter(
            "need at least two distinct sample values".into(),
        ));
    }
    let first_gap = points[1].0 - points[0].0;
    let last_gap = points[points.len() - 1].0 - points[points.len() - 2].0;
    let mut grid = Vec::with_capacity(points.len() + 2);
    grid.push((points[0].0 - 0.5 * first_gap, 0.0));
    grid.extend(points.iter().copied());
    grid.push((points[points.len() - 1].0 + 0.5 * last_gap, 1.0));
    FeatureDistribution::empirical(grid)
}
