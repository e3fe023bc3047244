//! Thompson-sampling baselines: one-level (on the product reward, 1/B
//! feedback) and two-level (separate prediction/transmission posteriors,
//! 2/B/B feedback).

use rand::RngCore;

use crate::core::FeedbackModel;
use crate::mathlib::sample_beta;

use super::{argmax_lowest, Feedback, Policy};

/// Standard Thompson sampling with a single Beta posterior per arm on the
/// product reward Z.
#[derive(Debug, Clone)]
pub struct OneLevelTsPolicy {
    pub s_z: Vec<u64>,
    pub f_z: Vec<u64>,
}

impl OneLevelTsPolicy {
    pub fn new(n_arms: usize) -> Self {
        Self {
            s_z: vec![0; n_arms],
            f_z: vec![0; n_arms],
        }
    }
}

impl Policy for OneLevelTsPolicy {
    fn name(&self) -> &'static str {
        "ts1b"
    }

    fn required_model(&self) -> Option<FeedbackModel> {
        Some(FeedbackModel::OneB)
    }

    fn select(&mut self, rng: &mut dyn RngCore) -> usize {
        let scores: Vec<f64> = (0..self.s_z.len())
            .map(|i| {
                sample_beta((self.s_z[i] + 1) as f64, (self.f_z[i] + 1) as f64, rng)
                    .expect("positive integer shapes")
            })
            .collect();
        argmax_lowest(&scores)
    }

    fn update(&mut self, feedback: &Feedback<'_>) {
        let Feedback::Reward { chosen, z } = feedback else {
            panic!("ts1b requires 1/B feedback, got {:?}", feedback.model());
        };
        if *z == 1 {
            self.s_z[*chosen] += 1;
        } else {
            self.f_z[*chosen] += 1;
        }
    }
}

/// Two-level Thompson sampling: independent Beta posteriors on the chosen
/// arm's prediction and transmission outcomes, selection by the product of
/// the two draws.
#[derive(Debug, Clone)]
pub struct TwoLevelTsPolicy {
    pub s_alpha: Vec<u64>,
    pub f_alpha: Vec<u64>,
    pub s_beta: Vec<u64>,
    pub f_beta: Vec<u64>,
}

impl TwoLevelTsPolicy {
    pub fn new(n_arms: usize) -> Self {
        Self {
            s_alpha: vec![0; n_arms],
            f_alpha: vec![0; n_arms],
            s_beta: vec![0; n_arms],
            f_beta: vec![0; n_arms],
        }
    }
}

impl Policy for TwoLevelTsPolicy {
    fn name(&self) -> &'static str {
        "ts2bb"
    }

    fn required_model(&self) -> Option<FeedbackModel> {
        Some(FeedbackModel::TwoBB)
    }

    fn select(&mut self, rng: &mut dyn RngCore) -> usize {
        let scores: Vec<f64> = (0..self.s_alpha.len())
            .map(|i| {
                let ta = sample_beta(
                    (self.s_alpha[i] + 1) as f64,
                    (self.f_alpha[i] + 1) as f64,
                    rng,
                )
                .expect("positive integer shapes");
                let tb = sample_beta(
                    (self.s_beta[i] + 1) as f64,
                    (self.f_beta[i] + 1) as f64,
                    rng,
                )
                .expect("positive integer shapes");
                ta * tb
            })
            .collect();
        argmax_lowest(&scores)
    }

    fn update(&mut self, feedback: &Feedback<'_>) {
        let Feedback::Pair { chosen, x, y } = feedback else {
            panic!("ts2bb requires 2/B/B feedback, got {:?}", feedback.model());
        };
        // Both level counters update every round: 2/B/B delivers both
        // outcomes of the chosen arm even when the transmission fails.
        if *x == 1 {
            self.s_alpha[*chosen] += 1;
        } else {
            self.f_alpha[*chosen] += 1;
        }
        if *y == 1 {
            self.s_beta[*chosen] += 1;
        } else {
            self.f_beta[*chosen] += 1;
        }
    }
}
