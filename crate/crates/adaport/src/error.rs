use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("ambiguous optimum: arms {0} and {1} tie for the maximum product")]
    AmbiguousOptimum(usize, usize),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("unknown policy '{0}' (known: {1})")]
    UnknownPolicy(String, String),

    #[error("policy '{policy}' requires {required:?} feedback, got {got:?}")]
    IncompatibleFeedback {
        policy: String,
        required: crate::core::FeedbackModel,
        got: crate::core::FeedbackModel,
    },

    #[error("trace error: {0}")]
    Trace(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("empty result set")]
    EmptyResults,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
