//! Scripted rollouts, their logs and exports, and the toy PPO task.

pub mod export;
pub mod log;
pub mod oracle;
pub mod toy_ppo;

pub use export::export_curves;
pub use log::{LogRecord, RolloutLog, RolloutMeta};
pub use oracle::{
    lag_mean_error, run_oracle_rollout, InterventionSettings, OracleConfig, OracleRobot,
};
pub use toy_ppo::{run_toy_ppo, ToyConfig, TrainingReport};
