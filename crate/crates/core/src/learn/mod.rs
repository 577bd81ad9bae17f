//! Losses and the reference actor-critic networks.

pub mod loss;
pub mod net;

pub use loss::{
    clipped_surrogate, discounted_returns, estimation_loss, gae_advantages, ppo_policy_loss,
    total_objective, value_and_advantage, value_targets, LossCoefficients, LossTerms, ValueTargets,
};
pub use net::{
    gradient_check, ActorCritic, Adam, Batch, GradCheckReport, Mlp, NetDims, NetSpec, SymmetryMaps,
};
