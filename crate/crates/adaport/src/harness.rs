//! Seeded replication runner: wires environments to policies while exposing
//! only the feedback model's permitted view, and aggregates regret and
//! degradation metrics across replications.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::core::{BernoulliInstance, FeedbackModel, RunResult};
use crate::env::{Environment, ReplayEnv, SyntheticEnv, XCorrelation};
use crate::error::{Error, Result};
use crate::policies::{create_policy, Feedback, Policy, PolicyContext};
use crate::traces::FeedbackMatrices;

/// How regret increments are accounted per round.
#[derive(Debug, Clone)]
pub enum RegretReference {
    /// Synthetic: the chosen arm's known gap Δ_i.
    Gaps(Vec<f64>),
    /// Trace: the static trace-oracle arm's realized reward minus the chosen
    /// arm's.
    TraceOracle(usize),
}

/// Runs one seeded replication of T rounds. The policy only ever sees the
/// `model`-permitted view of each round.
pub fn run_replication(
    env: &mut dyn Environment,
    policy: &mut dyn Policy,
    model: FeedbackModel,
    horizon: usize,
    seed: u64,
    reference: &RegretReference,
) -> Result<RunResult> {
    if let Some(required) = policy.required_model() {
        if required != model {
            return Err(Error::IncompatibleFeedback {
                policy: policy.name().into(),
                required,
                got: model,
            });
        }
    }
    // stream 1: policy randomness; stream 0 is reserved for environments
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(1);

    let n = env.n_arms();
    let mut cumulative_regret = Vec::with_capacity(horizon);
    let mut failed_deliveries = Vec::with_capacity(horizon);
    let mut arm_pull_counts = vec![0u64; n];
    let mut regret = 0.0f64;
    let mut failures = 0u64;

    for _ in 0..horizon {
        let chosen = policy.select(&mut rng);
        let round = env
            .next_round()
            .ok_or_else(|| Error::Trace("environment exhausted before horizon".into()))?;
        let z = round.reward(chosen);
        let feedback = match model {
            FeedbackModel::OneB => Feedback::Reward { chosen, z },
            FeedbackModel::TwoBB => Feedback::Pair {
                chosen,
                x: round.x_all[chosen],
                y: round.y_all[chosen],
            },
            FeedbackModel::TwoFB => Feedback::FullPrediction {
                x_all: &round.x_all,
                chosen,
                y: round.y_all[chosen],
            },
        };
        policy.update(&feedback);

        regret += match reference {
            RegretReference::Gaps(gaps) => gaps[chosen],
            RegretReference::TraceOracle(best) => (round.reward(*best) as f64) - (z as f64),
        };
        failures += (z == 0) as u64;
        arm_pull_counts[chosen] += 1;
        cumulative_regret.push(regret);
        failed_deliveries.push(failures);
    }
    Ok(RunResult {
        cumulative_regret,
        failed_deliveries,
        arm_pull_counts,
        seed,
    })
}

/// Cross-replication summary for one policy.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsSummary {
    pub mean_regret: Vec<f64>,
    pub stderr_regret: Vec<f64>,
    pub mean_failed: Vec<f64>,
    /// Mean over replications with a defined denominator; `None` when every
    /// replication had zero oracle failures.
    pub relative_degradation: Option<f64>,
    /// Replications excluded because the oracle had zero failures.
    pub degradation_excluded: usize,
    /// (t, R(t)/ln t) at logarithmically spaced checkpoints.
    pub regret_over_log_t: Vec<(usize, f64)>,
    pub mean_pull_counts: Vec<f64>,
    pub replications: usize,
}

pub fn aggregate(results: &[RunResult], oracle_results: &[RunResult]) -> Result<MetricsSummary> {
    if results.is_empty() {
        return Err(Error::EmptyResults);
    }
    let horizon = results[0].cumulative_regret.len();
    if results
        .iter()
        .chain(oracle_results)
        .any(|r| r.cumulative_regret.len() != horizon)
    {
        return Err(Error::Config("mismatched horizons across replications".into()));
    }
    if oracle_results.len() != results.len() {
        return Err(Error::Config(
            "need one oracle replication per policy replication".into(),
        ));
    }
    let reps = results.len() as f64;

    let mut mean_regret = vec![0.0; horizon];
    let mut mean_failed = vec![0.0; horizon];
    for r in results {
        for t in 0..horizon {
            mean_regret[t] += r.cumulative_regret[t] / reps;
            mean_failed[t] += r.failed_deliveries[t] as f64 / reps;
        }
    }
    let mut stderr_regret = vec![0.0; horizon];
    if results.len() > 1 {
        for r in results {
            for t in 0..horizon {
                let d = r.cumulative_regret[t] - mean_regret[t];
                stderr_regret[t] += d * d;
            }
        }
        for s in &mut stderr_regret {
            *s = (*s / (reps - 1.0)).sqrt() / reps.sqrt();
        }
    }

    let mut degradations = Vec::new();
    let mut excluded = 0usize;
    for (r, o) in results.iter().zip(oracle_results) {
        let opt = *o.failed_deliveries.last().unwrap() as f64;
        if opt == 0.0 {
            excluded += 1;
            continue;
        }
        let alg = *r.failed_deliveries.last().unwrap() as f64;
        degradations.push((alg - opt) / opt);
    }
    let relative_degradation = if degradations.is_empty() {
        None
    } else {
        Some(degradations.iter().sum::<f64>() / degradations.len() as f64)
    };

    let n_arms = results[0].arm_pull_counts.len();
    let mut mean_pull_counts = vec![0.0; n_arms];
    for r in results {
        for (m, &c) in mean_pull_counts.iter_mut().zip(&r.arm_pull_counts) {
            *m += c as f64 / reps;
        }
    }

    let regret_over_log_t = log_checkpoints(horizon)
        .into_iter()
        .map(|t| (t, mean_regret[t - 1] / (t as f64).ln()))
        .collect();

    Ok(MetricsSummary {
        mean_regret,
        stderr_regret,
        mean_failed,
        relative_degradation,
        degradation_excluded: excluded,
        regret_over_log_t,
        mean_pull_counts,
        replications: results.len(),
    })
}

fn log_checkpoints(horizon: usize) -> Vec<usize> {
    let lo = 10usize.min(horizon);
    let mut points: Vec<usize> = (0..=30)
        .map(|k| {
            let f = (lo as f64).ln() + k as f64 / 30.0 * ((horizon as f64).ln() - (lo as f64).ln());
            (f.exp().round() as usize).clamp(1, horizon)
        })
        .collect();
    points.dedup();
    points
}

/// Finite-difference estimate of the ln T regret coefficient over a window:
/// (R(t₂) − R(t₁)) / (ln t₂ − ln t₁).
pub fn regret_slope(summary: &MetricsSummary, window: (usize, usize)) -> Result<f64> {
    let (t1, t2) = window;
    if t1 == 0 || t1 >= t2 || t2 > summary.mean_regret.len() {
        return Err(Error::Config(format!(
            "slope window ({t1}, {t2}) outside horizon {}",
            summary.mean_regret.len()
        )));
    }
    Ok((summary.mean_regret[t2 - 1] - summary.mean_regret[t1 - 1])
        / ((t2 as f64).ln() - (t1 as f64).ln()))
}

/// What drives the rounds of an experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvSpec {
    Synthetic {
        instance: PathBuf,
        #[serde(default)]
        correlated_x: bool,
    },
    Trace {
        poses: PathBuf,
        bandwidth: PathBuf,
        base_size_megabits: f64,
        #[serde(default = "default_interval")]
        interval_s: f64,
    },
}

fn default_interval() -> f64 {
    0.01
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicyEntry {
    pub name: String,
    /// Defaults to the policy's required model, or 1/B for policies that
    /// accept any.
    #[serde(default)]
    pub feedback: Option<FeedbackModel>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub env: EnvSpec,
    pub policies: Vec<PolicyEntry>,
    pub horizon: usize,
    #[serde(default = "default_reps")]
    pub replications: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_reps() -> usize {
    50
}

impl ExperimentConfig {
    pub fn from_json_file(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let cfg: Self = serde_json::from_reader(std::fs::File::open(path)?)?;
        if cfg.horizon == 0 || cfg.replications == 0 {
            return Err(Error::Config("horizon and replications must be positive".into()));
        }
        Ok(cfg)
    }
}

/// A resolved experiment: an environment factory plus regret accounting.
pub enum ExperimentEnv {
    Synthetic {
        instance: BernoulliInstance,
        correlation: XCorrelation,
    },
    Trace {
        matrices: Arc<FeedbackMatrices>,
    },
}

impl ExperimentEnv {
    pub fn n_arms(&self) -> usize {
        match self {
            ExperimentEnv::Synthetic { instance, .. } => instance.n_arms(),
            ExperimentEnv::Trace { matrices } => matrices.n_arms,
        }
    }

    pub fn oracle_arm(&self) -> Result<usize> {
        match self {
            ExperimentEnv::Synthetic { instance, .. } => instance.optimal_arm(),
            ExperimentEnv::Trace { matrices } => Ok(matrices.oracle_arm()),
        }
    }

    pub fn regret_reference(&self) -> Result<RegretReference> {
        match self {
            ExperimentEnv::Synthetic { instance, .. } => {
                let best = instance.optimal_arm()?;
                let opt = instance.product(best);
                Ok(RegretReference::Gaps(
                    (0..instance.n_arms()).map(|i| opt - instance.product(i)).collect(),
                ))
            }
            ExperimentEnv::Trace { matrices } => {
                Ok(RegretReference::TraceOracle(matrices.oracle_arm()))
            }
        }
    }

    fn make_env(&self, seed: u64) -> Result<Box<dyn Environment>> {
        match self {
            ExperimentEnv::Synthetic { instance, correlation } => Ok(Box::new(SyntheticEnv::new(
                instance.clone(),
                *correlation,
                seed,
            )?)),
            ExperimentEnv::Trace { matrices } => Ok(Box::new(ReplayEnv::new(matrices.clone()))),
        }
    }
}

pub fn resolve_feedback(name: &str, entry_model: Option<FeedbackModel>) -> Result<FeedbackModel> {
    let probe = create_policy(
        name,
        &PolicyContext { n_arms: 2, horizon: Some(1), oracle_arm: Some(0) },
    )?;
    Ok(entry_model
        .or(probe.required_model())
        .unwrap_or(FeedbackModel::OneB))
}

/// Runs `replications` seeded replications of one policy; replication `k`
/// uses seed `base_seed + k`. Replications run in parallel but results come
/// back in replication-index order, so output is independent of concurrency.
pub fn run_policy(
    exp: &ExperimentEnv,
    policy_name: &str,
    model: FeedbackModel,
    horizon: usize,
    replications: usize,
    base_seed: u64,
) -> Result<Vec<RunResult>> {
    let reference = exp.regret_reference()?;
    let ctx = PolicyContext {
        n_arms: exp.n_arms(),
        horizon: Some(horizon as u64),
        oracle_arm: exp.oracle_arm().ok(),
    };
    (0..replications)
        .into_par_iter()
        .map(|rep| {
            let seed = base_seed + rep as u64;
            let mut env = exp.make_env(seed)?;
            let mut policy = create_policy(policy_name, &ctx)?;
            run_replication(env.as_mut(), policy.as_mut(), model, horizon, seed, &reference)
        })
        .collect()
}

/// Per-policy curve CSV: `t,mean_regret,stderr,mean_failed`.
pub fn write_curves_csv(summary: &MetricsSummary, mut out: impl Write) -> Result<()> {
    writeln!(out, "t,mean_regret,stderr,mean_failed")?;
    for t in 0..summary.mean_regret.len() {
        writeln!(
            out,
            "{},{},{},{}",
            t + 1,
            summary.mean_regret[t],
            summary.stderr_regret[t],
            summary.mean_failed[t]
        )?;
    }
    Ok(())
}

/// Minimal static SVG line plot of the mean regret curves.
pub fn render_svg(curves: &[(String, &[f64])]) -> String {
    const W: f64 = 720.0;
    const H: f64 = 480.0;
    const M: f64 = 50.0;
    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let y_max = curves
        .iter()
        .flat_map(|(_, c)| c.iter().cloned())
        .fold(1e-9f64, f64::max);
    let x_max = curves.iter().map(|(_, c)| c.len()).max().unwrap_or(1) as f64;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <line x1=\"{M}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - M,
        W - M,
        H - M,
        H - M
    );
    for (k, (name, curve)) in curves.iter().enumerate() {
        let color = palette[k % palette.len()];
        let step = (curve.len() / 600).max(1);
        let pts: Vec<String> = curve
            .iter()
            .enumerate()
            .step_by(step)
            .map(|(t, &v)| {
                let x = M + (t as f64 + 1.0) / x_max * (W - 2.0 * M);
                let y = H - M - v / y_max * (H - 2.0 * M);
                format!("{x:.1},{y:.1}")
            })
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n\
             <text x=\"{}\" y=\"{}\" fill=\"{color}\" font-size=\"13\">{name}</text>\n",
            pts.join(" "),
            W - M + 4.0 - 60.0,
            M + 16.0 * k as f64
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
