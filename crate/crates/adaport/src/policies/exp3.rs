//! EXP3 under 1/B feedback (exponential weights with importance-weighted
//! reward estimates).

use rand::{Rng, RngCore};

use crate::core::FeedbackModel;

use super::{Feedback, Policy};

const WEIGHT_CAP: f64 = 1e100;

#[derive(Debug, Clone)]
pub struct Exp3Policy {
    pub weights: Vec<f64>,
    pub gamma: f64,
}

impl Exp3Policy {
    /// With a known horizon, γ = min{1, sqrt(N·ln N / ((e−1)·T))}; without
    /// one, γ = 0.1.
    pub fn new(n_arms: usize, horizon: Option<u64>) -> Self {
        let gamma = match horizon {
            Some(t) if t > 0 => {
                let n = n_arms as f64;
                (n * n.ln() / ((std::f64::consts::E - 1.0) * t as f64))
                    .sqrt()
                    .min(1.0)
            }
            _ => 0.1,
        };
        Self {
            weights: vec![1.0; n_arms],
            gamma,
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.weights.len() as f64;
        let total: f64 = self.weights.iter().sum();
        self.weights
            .iter()
            .map(|w| (1.0 - self.gamma) * w / total + self.gamma / n)
            .collect()
    }
}

impl Policy for Exp3Policy {
    fn name(&self) -> &'static str {
        "exp3"
    }

    fn required_model(&self) -> Option<FeedbackModel> {
        Some(FeedbackModel::OneB)
    }

    fn select(&mut self, rng: &mut dyn RngCore) -> usize {
        let probs = self.probabilities();
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        probs.len() - 1
    }

    fn update(&mut self, feedback: &Feedback<'_>) {
        let Feedback::Reward { chosen, z } = feedback else {
            panic!("exp3 requires 1/B feedback, got {:?}", feedback.model());
        };
        if *z == 0 {
            return;
        }
        let n = self.weights.len() as f64;
        let p_chosen = self.probabilities()[*chosen];
        let z_hat = 1.0 / p_chosen;
        self.weights[*chosen] *= (self.gamma * z_hat / n).exp();

        let max = self.weights.iter().cloned().fold(0.0f64, f64::max);
        if max > WEIGHT_CAP {
            // probabilities are scale-invariant in the weights
            for w in &mut self.weights {
                *w /= max;
            }
        }
    }
}
