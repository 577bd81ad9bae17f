//! Building blocks for commandable humanoid whole-body locomotion control:
//! gait clocks, swing-foot targets, the command space and its curricula,
//! rewards, mirror symmetry, upper-body intervention, the learning losses,
//! and a scripted rollout harness that exercises all of them.

pub mod command;
pub mod config;
pub mod error;
pub mod gait;
pub mod intervention;
pub mod layout;
pub mod learn;
pub mod metrics;
pub mod mirror;
pub mod obs;
pub mod plot;
pub mod reward;
pub mod rollout;
pub mod step;
pub mod swing;

pub use error::{Error, Result};
