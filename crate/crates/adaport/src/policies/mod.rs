//! Per-round selection/update strategies behind a common [`Policy`] trait,
//! registered by name and selected at runtime.

mod adaport;
mod exp3;
mod fixed;
mod thompson;

pub use adaport::AdaPortPolicy;
pub use exp3::Exp3Policy;
pub use fixed::{HeuristicPolicy, OraclePolicy};
pub use thompson::{OneLevelTsPolicy, TwoLevelTsPolicy};

use rand::RngCore;

use crate::core::FeedbackModel;
use crate::error::{Error, Result};

/// The view of one round a policy is allowed to see, shaped by the active
/// [`FeedbackModel`]. The harness constructs exactly one variant per round;
/// a policy can never read fields its feedback model hides.
#[derive(Debug, Clone, Copy)]
pub enum Feedback<'a> {
    /// 1/B: only the product reward of the chosen arm.
    Reward { chosen: usize, z: u8 },
    /// 2/B/B: the chosen arm's prediction and transmission outcomes.
    Pair { chosen: usize, x: u8, y: u8 },
    /// 2/F/B: the full prediction vector plus the chosen arm's transmission
    /// outcome.
    FullPrediction {
        x_all: &'a [u8],
        chosen: usize,
        y: u8,
    },
}

impl Feedback<'_> {
    pub fn model(&self) -> FeedbackModel {
        match self {
            Feedback::Reward { .. } => FeedbackModel::OneB,
            Feedback::Pair { .. } => FeedbackModel::TwoBB,
            Feedback::FullPrediction { .. } => FeedbackModel::TwoFB,
        }
    }
}

pub trait Policy: Send {
    fn name(&self) -> &'static str;

    /// The feedback model this policy consumes; `None` accepts any.
    fn required_model(&self) -> Option<FeedbackModel>;

    fn select(&mut self, rng: &mut dyn RngCore) -> usize;

    fn update(&mut self, feedback: &Feedback<'_>);
}

/// Everything a constructor may need; unused fields are ignored by policies
/// that do not need them.
#[derive(Debug, Clone, Default)]
pub struct PolicyContext {
    pub n_arms: usize,
    /// Known horizon, used by EXP3's exploration-rate tuning.
    pub horizon: Option<u64>,
    /// Best arm, required by the oracle policy only.
    pub oracle_arm: Option<usize>,
}

type Constructor = fn(&PolicyContext) -> Result<Box<dyn Policy>>;

/// Name → constructor table. Order here is the display order everywhere.
pub const REGISTRY: &[(&str, Constructor)] = &[
    ("adaport", |ctx| Ok(Box::new(AdaPortPolicy::new(ctx.n_arms)))),
    ("ts1b", |ctx| Ok(Box::new(OneLevelTsPolicy::new(ctx.n_arms)))),
    ("ts2bb", |ctx| Ok(Box::new(TwoLevelTsPolicy::new(ctx.n_arms)))),
    ("exp3", |ctx| {
        Ok(Box::new(Exp3Policy::new(ctx.n_arms, ctx.horizon)))
    }),
    ("heuristic", |_| Ok(Box::new(HeuristicPolicy))),
    ("oracle", |ctx| {
        let arm = ctx
            .oracle_arm
            .ok_or_else(|| Error::Config("oracle policy needs a known best arm".into()))?;
        Ok(Box::new(OraclePolicy::new(arm)))
    }),
];

pub fn policy_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|(n, _)| *n).collect()
}

pub fn create_policy(name: &str, ctx: &PolicyContext) -> Result<Box<dyn Policy>> {
    REGISTRY
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, make)| make(ctx))
        .unwrap_or_else(|| Err(Error::UnknownPolicy(name.into(), policy_names().join(", "))))
}

/// Lowest-index arg max over a score vector.
pub(crate) fn argmax_lowest(scores: &[f64]) -> usize {
    let mut best = 0usize;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}
