//! Two-level hybrid-feedback online learning for adaptive portion selection:
//! interchangeable selection policies behind a registry, regret lower-bound
//! constants for the three feedback models, synthetic and trace-driven
//! environments, and a seeded replication harness.

pub mod core;
pub mod env;
pub mod error;
pub mod harness;
pub mod mathlib;
pub mod policies;
pub mod theory;
pub mod traces;

pub use error::{Error, Result};
