//! The hybrid-feedback policy: full-information empirical means for the
//! prediction rates, Thompson sampling on the transmission rates.

use rand::RngCore;

use crate::core::FeedbackModel;
use crate::mathlib::sample_beta;

use super::{argmax_lowest, Feedback, Policy};

#[derive(Debug, Clone)]
pub struct AdaPortPolicy {
    /// Empirical prediction means ᾱ_i, updated every round from the full
    /// prediction vector. ᾱ_i(1) = 0.
    pub alpha_bar: Vec<f64>,
    /// Timeslot counter, 1-based.
    pub t: u64,
    /// Transmission successes of the chosen arm (bandit-fed).
    pub s_beta: Vec<u64>,
    /// Transmission failures of the chosen arm (bandit-fed).
    pub f_beta: Vec<u64>,
}

impl AdaPortPolicy {
    pub fn new(n_arms: usize) -> Self {
        Self {
            alpha_bar: vec![0.0; n_arms],
            t: 1,
            s_beta: vec![0; n_arms],
            f_beta: vec![0; n_arms],
        }
    }
}

impl Policy for AdaPortPolicy {
    fn name(&self) -> &'static str {
        "adaport"
    }

    fn required_model(&self) -> Option<FeedbackModel> {
        Some(FeedbackModel::TwoFB)
    }

    fn select(&mut self, rng: &mut dyn RngCore) -> usize {
        let scores: Vec<f64> = (0..self.alpha_bar.len())
            .map(|i| {
                let theta = sample_beta(
                    (self.s_beta[i] + 1) as f64,
                    (self.f_beta[i] + 1) as f64,
                    rng,
                )
                .expect("positive integer shapes");
                self.alpha_bar[i] * theta
            })
            .collect();
        argmax_lowest(&scores)
    }

    fn update(&mut self, feedback: &Feedback<'_>) {
        let Feedback::FullPrediction { x_all, chosen, y } = feedback else {
            panic!("adaport requires 2/F/B feedback, got {:?}", feedback.model());
        };
        debug_assert_eq!(x_all.len(), self.alpha_bar.len());
        let t = self.t as f64;
        for (a, &x) in self.alpha_bar.iter_mut().zip(x_all.iter()) {
            *a += (x as f64 - *a) / t;
        }
        if *y == 1 {
            self.s_beta[*chosen] += 1;
        } else {
            self.f_beta[*chosen] += 1;
        }
        self.t += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn fresh_state_falls_to_tie_rule() {
        let mut p = AdaPortPolicy::new(3);
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        for _ in 0..20 {
            assert_eq!(p.select(&mut rng), 0);
        }
    }

    #[test]
    fn zero_mean_annihilates_arm() {
        let mut p = AdaPortPolicy::new(2);
        p.alpha_bar = vec![1.0, 0.0];
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for _ in 0..50 {
            assert_eq!(p.select(&mut rng), 0);
        }
    }

    #[test]
    fn concentrated_posterior_dominates_selection() {
        let mut p = AdaPortPolicy::new(2);
        p.alpha_bar = vec![0.8, 0.8];
        p.s_beta = vec![999, 0];
        p.f_beta = vec![1, 0];
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let picks_0 = (0..100_000).filter(|_| p.clone().select(&mut rng) == 0).count();
        // Pr(θ₀ > θ₁) with θ₀ ≈ 0.999 and θ₁ ~ Uniform(0,1) is ≈ 0.999
        assert!(picks_0 > 50_000, "arm 0 picked only {picks_0} times");
    }

    #[test]
    fn update_matches_batch_mean_and_locality() {
        let mut p = AdaPortPolicy::new(2);
        p.update(&Feedback::FullPrediction { x_all: &[1, 0], chosen: 1, y: 0 });
        assert_eq!(p.alpha_bar, vec![1.0, 0.0]);
        assert_eq!(p.f_beta, vec![0, 1]);
        assert_eq!(p.s_beta, vec![0, 0]);

        p.update(&Feedback::FullPrediction { x_all: &[0, 0], chosen: 0, y: 1 });
        p.update(&Feedback::FullPrediction { x_all: &[1, 0], chosen: 0, y: 1 });
        assert!((p.alpha_bar[0] - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(p.s_beta, vec![2, 0]);
        assert_eq!(p.t, 4);
    }
}
