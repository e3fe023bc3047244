//! Non-learning policies: the minimum-portion heuristic and the clairvoyant
//! oracle.

use rand::RngCore;

use crate::core::FeedbackModel;

use super::{Feedback, Policy};

/// Always delivers the minimum-viewport portion (arm 0 in the size-ordered
/// portion list).
#[derive(Debug, Clone, Copy)]
pub struct HeuristicPolicy;

impl Policy for HeuristicPolicy {
    fn name(&self) -> &'static str {
        "heuristic"
    }

    fn required_model(&self) -> Option<FeedbackModel> {
        None
    }

    fn select(&mut self, _rng: &mut dyn RngCore) -> usize {
        0
    }

    fn update(&mut self, _feedback: &Feedback<'_>) {}
}

/// Always plays the best arm, which the harness computes from the instance
/// (synthetic) or the full feedback matrices (trace).
#[derive(Debug, Clone, Copy)]
pub struct OraclePolicy {
    pub best_arm: usize,
}

impl OraclePolicy {
    pub fn new(best_arm: usize) -> Self {
        Self { best_arm }
    }
}

impl Policy for OraclePolicy {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn required_model(&self) -> Option<FeedbackModel> {
        None
    }

    fn select(&mut self, _rng: &mut dyn RngCore) -> usize {
        self.best_arm
    }

    fn update(&mut self, _feedback: &Feedback<'_>) {}
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn constant_policies_ignore_feedback() {
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let mut h = HeuristicPolicy;
        let mut o = OraclePolicy::new(2);
        for _ in 0..10 {
            assert_eq!(h.select(&mut rng), 0);
            assert_eq!(o.select(&mut rng), 2);
            h.update(&Feedback::Reward { chosen: 0, z: 0 });
            o.update(&Feedback::Pair { chosen: 2, x: 0, y: 0 });
        }
        assert_eq!(h.select(&mut rng), 0);
        assert_eq!(o.select(&mut rng), 2);
    }
}
