//! Domain types shared across the crate: synthetic instances, per-round
//! observations, feedback-model selection, and run bookkeeping.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used to detect a tie for the optimal arm's reward product.
pub const OPTIMUM_TIE_TOL: f64 = 1e-12;

/// A synthetic two-level Bernoulli environment: per-arm prediction success
/// rates `alpha` and transmission success rates `beta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernoulliInstance {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl BernoulliInstance {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::InvalidInstance(format!(
                "alpha has {} entries but beta has {}",
                alpha.len(),
                beta.len()
            )));
        }
        if alpha.len() < 2 {
            return Err(Error::InvalidInstance(format!(
                "need at least 2 arms, got {}",
                alpha.len()
            )));
        }
        for (name, v) in [("alpha", &alpha), ("beta", &beta)] {
            if let Some(bad) = v.iter().find(|p| !(0.0..=1.0).contains(*p) || p.is_nan()) {
                return Err(Error::InvalidInstance(format!(
                    "{name} entry {bad} outside [0,1]"
                )));
            }
        }
        Ok(Self { alpha, beta })
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            alpha: Vec<f64>,
            beta: Vec<f64>,
        }
        let raw: Raw = serde_json::from_reader(std::fs::File::open(path)?)?;
        Self::new(raw.alpha, raw.beta)
    }

    pub fn n_arms(&self) -> usize {
        self.alpha.len()
    }

    /// Expected reward of arm `i`, the product α_i·β_i.
    pub fn product(&self, i: usize) -> f64 {
        self.alpha[i] * self.beta[i]
    }

    /// Index of the unique arm maximizing α_i·β_i.
    ///
    /// Errors if a second arm comes within [`OPTIMUM_TIE_TOL`] of the maximum:
    /// the theory constants are undefined at ties.
    pub fn optimal_arm(&self) -> Result<usize> {
        let mut best = 0usize;
        for i in 1..self.n_arms() {
            if self.product(i) > self.product(best) {
                best = i;
            }
        }
        for i in 0..self.n_arms() {
            if i != best && (self.product(best) - self.product(i)).abs() <= OPTIMUM_TIE_TOL {
                return Err(Error::AmbiguousOptimum(best.min(i), best.max(i)));
            }
        }
        Ok(best)
    }
}

/// Δ_i: the optimal product minus arm `i`'s product. Zero at the optimum,
/// strictly positive elsewhere.
pub fn reward_gap(instance: &BernoulliInstance, i: usize) -> Result<f64> {
    let best = instance.optimal_arm()?;
    Ok(instance.product(best) - instance.product(i))
}

/// What the harness reveals to a policy each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackModel {
    /// Only the product reward z = x·y of the chosen arm.
    OneB,
    /// The chosen arm's (x, y) pair.
    TwoBB,
    /// The full prediction vector plus the chosen arm's y.
    TwoFB,
}

/// One round of environment output. `y_all` is harness-internal; policies
/// only ever see the view permitted by the active [`FeedbackModel`].
#[derive(Debug, Clone)]
pub struct ObservationRound {
    pub t: usize,
    pub x_all: Vec<u8>,
    pub y_all: Vec<u8>,
}

impl ObservationRound {
    pub fn reward(&self, chosen: usize) -> u8 {
        self.x_all[chosen] * self.y_all[chosen]
    }
}

/// Per-replication output: cumulative series plus pull counts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunResult {
    /// Cumulative regret after each timeslot (length T, nondecreasing).
    pub cumulative_regret: Vec<f64>,
    /// Cumulative count of z=0 rounds after each timeslot (length T).
    pub failed_deliveries: Vec<u64>,
    pub arm_pull_counts: Vec<u64>,
    pub seed: u64,
}
