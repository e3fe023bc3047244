//! Round-by-round outcome generation: synthetic i.i.d. Bernoulli
//! environments (independent or nested-correlated prediction outcomes) and
//! replay of precomputed feedback matrices.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::core::{BernoulliInstance, ObservationRound};
use crate::error::{Error, Result};
use crate::traces::FeedbackMatrices;

pub trait Environment {
    fn n_arms(&self) -> usize;

    /// Next round's outcomes, or `None` when a finite trace is exhausted.
    fn next_round(&mut self) -> Option<ObservationRound>;
}

/// How the synthetic generator draws the prediction vector X(t).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XCorrelation {
    /// Components drawn independently.
    Independent,
    /// One latent error magnitude per round; x_i = 1 iff it falls below arm
    /// i's threshold α_i. Marginals are unchanged and every emitted vector
    /// is componentwise nondecreasing across size-ordered arms. Requires α
    /// nondecreasing.
    NestedThreshold,
}

pub struct SyntheticEnv {
    instance: BernoulliInstance,
    correlation: XCorrelation,
    rng: ChaCha12Rng,
    t: usize,
}

impl SyntheticEnv {
    pub fn new(instance: BernoulliInstance, correlation: XCorrelation, seed: u64) -> Result<Self> {
        if correlation == XCorrelation::NestedThreshold
            && instance.alpha.windows(2).any(|w| w[1] < w[0])
        {
            return Err(Error::InvalidInstance(
                "nested-threshold correlation needs α nondecreasing in arm order".into(),
            ));
        }
        Ok(Self {
            instance,
            correlation,
            rng: ChaCha12Rng::seed_from_u64(seed),
            t: 0,
        })
    }

    pub fn instance(&self) -> &BernoulliInstance {
        &self.instance
    }
}

impl Environment for SyntheticEnv {
    fn n_arms(&self) -> usize {
        self.instance.n_arms()
    }

    fn next_round(&mut self) -> Option<ObservationRound> {
        self.t += 1;
        let x_all: Vec<u8> = match self.correlation {
            XCorrelation::Independent => self
                .instance
                .alpha
                .iter()
                .map(|&a| self.rng.random_bool(a) as u8)
                .collect(),
            XCorrelation::NestedThreshold => {
                let u: f64 = self.rng.random();
                self.instance.alpha.iter().map(|&a| (u < a) as u8).collect()
            }
        };
        // Y is always component-wise independent and independent of X
        let y_all: Vec<u8> = self
            .instance
            .beta
            .iter()
            .map(|&b| self.rng.random_bool(b) as u8)
            .collect();
        Some(ObservationRound { t: self.t, x_all, y_all })
    }
}

/// Serves precomputed matrices row by row in trace order; never wraps.
pub struct ReplayEnv {
    matrices: Arc<FeedbackMatrices>,
    cursor: usize,
}

impl ReplayEnv {
    pub fn new(matrices: Arc<FeedbackMatrices>) -> Self {
        Self { matrices, cursor: 0 }
    }
}

impl Environment for ReplayEnv {
    fn n_arms(&self) -> usize {
        self.matrices.n_arms
    }

    fn next_round(&mut self) -> Option<ObservationRound> {
        if self.cursor >= self.matrices.t_count {
            return None;
        }
        let round = self.matrices.row(self.cursor);
        self.cursor += 1;
        Some(round)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(alpha: &[f64], beta: &[f64]) -> BernoulliInstance {
        BernoulliInstance::new(alpha.to_vec(), beta.to_vec()).unwrap()
    }

    #[test]
    fn degenerate_rates_are_deterministic() {
        let mut env =
            SyntheticEnv::new(inst(&[1.0, 0.0], &[1.0, 0.0]), XCorrelation::Independent, 0)
                .unwrap();
        for _ in 0..100 {
            let r = env.next_round().unwrap();
            assert_eq!(r.x_all, vec![1, 0]);
            assert_eq!(r.y_all, vec![1, 0]);
        }
    }

    #[test]
    fn marginals_within_binomial_band() {
        let alpha = [0.3, 0.7];
        let beta = [0.9, 0.2];
        for corr in [XCorrelation::Independent, XCorrelation::NestedThreshold] {
            let mut env = SyntheticEnv::new(inst(&alpha, &beta), corr, 42).unwrap();
            let n = 100_000usize;
            let mut x_sum = [0u64; 2];
            let mut y_sum = [0u64; 2];
            for _ in 0..n {
                let r = env.next_round().unwrap();
                for i in 0..2 {
                    x_sum[i] += r.x_all[i] as u64;
                    y_sum[i] += r.y_all[i] as u64;
                }
            }
            for i in 0..2 {
                let band = |p: f64| 3.0 * (p * (1.0 - p) / n as f64).sqrt();
                let xm = x_sum[i] as f64 / n as f64;
                let ym = y_sum[i] as f64 / n as f64;
                assert!((xm - alpha[i]).abs() < band(alpha[i]), "x marginal {xm} vs {}", alpha[i]);
                assert!((ym - beta[i]).abs() < band(beta[i]), "y marginal {ym} vs {}", beta[i]);
            }
        }
    }

    #[test]
    fn fixed_seed_reproduces_stream() {
        let run = || {
            let mut env =
                SyntheticEnv::new(inst(&[0.4, 0.6], &[0.5, 0.5]), XCorrelation::Independent, 7)
                    .unwrap();
            (0..50).map(|_| env.next_round().unwrap().x_all).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn nested_threshold_emits_nondecreasing_patterns() {
        let alpha = [0.5, 0.7, 0.9];
        let mut env =
            SyntheticEnv::new(inst(&alpha, &[0.5, 0.5, 0.5]), XCorrelation::NestedThreshold, 3)
                .unwrap();
        let n = 100_000usize;
        let mut pattern_counts = std::collections::HashMap::new();
        for _ in 0..n {
            let r = env.next_round().unwrap();
            for w in r.x_all.windows(2) {
                assert!(w[1] >= w[0], "pattern {:?} not nondecreasing", r.x_all);
            }
            *pattern_counts.entry(r.x_all).or_insert(0usize) += 1;
        }
        // threshold construction: Pr(1,1,1)=0.5, Pr(0,1,1)=0.2, Pr(0,0,1)=0.2, Pr(0,0,0)=0.1
        let frac = |p: &[u8]| {
            pattern_counts.get(p).copied().unwrap_or(0) as f64 / n as f64
        };
        assert!((frac(&[1, 1, 1]) - 0.5).abs() < 0.01);
        assert!((frac(&[0, 1, 1]) - 0.2).abs() < 0.01);
        assert!((frac(&[0, 0, 1]) - 0.2).abs() < 0.01);
        assert!((frac(&[0, 0, 0]) - 0.1).abs() < 0.01);
    }

    #[test]
    fn nested_threshold_constant_alpha_gives_identical_components() {
        let mut env = SyntheticEnv::new(
            inst(&[0.6, 0.6, 0.6], &[0.5, 0.5, 0.5]),
            XCorrelation::NestedThreshold,
            1,
        )
        .unwrap();
        for _ in 0..200 {
            let r = env.next_round().unwrap();
            assert!(r.x_all.iter().all(|&v| v == r.x_all[0]));
        }
    }

    #[test]
    fn nested_threshold_rejects_decreasing_alpha() {
        assert!(SyntheticEnv::new(
            inst(&[0.9, 0.5], &[0.5, 0.5]),
            XCorrelation::NestedThreshold,
            0
        )
        .is_err());
    }

    #[test]
    fn replay_serves_rows_in_order_then_ends() {
        let m = Arc::new(FeedbackMatrices {
            x: vec![vec![1, 0]],
            y: vec![vec![0, 1]],
            t_count: 1,
            n_arms: 2,
        });
        let mut env = ReplayEnv::new(m.clone());
        let r = env.next_round().unwrap();
        assert_eq!(r.x_all, vec![1, 0]);
        assert_eq!(r.y_all, vec![0, 1]);
        assert!(env.next_round().is_none());
        assert!(env.next_round().is_none());
    }

    #[test]
    fn replay_is_bit_exact() {
        let m = Arc::new(FeedbackMatrices {
            x: vec![vec![0, 1], vec![1, 1], vec![0, 0]],
            y: vec![vec![1, 1], vec![0, 1], vec![1, 0]],
            t_count: 3,
            n_arms: 2,
        });
        let mut env = ReplayEnv::new(m.clone());
        for t in 0..3 {
            let r = env.next_round().unwrap();
            assert_eq!(r.x_all, m.x[t]);
            assert_eq!(r.y_all, m.y[t]);
            assert_eq!(r.t, t + 1);
        }
    }
}
