//! PPO surrogate, value targets, estimation loss and the combined objective.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossCoefficients {
    pub lambda_policy: f64,
    pub lambda_est: f64,
    /// Weight of the symmetry loss.
    pub beta: f64,
    pub clip: f64,
    pub gamma: f64,
    /// When set, advantages use GAE with this λ instead of plain
    /// discounted returns.
    pub gae_lambda: Option<f64>,
}

impl Default for LossCoefficients {
    fn default() -> Self {
        Self {
            lambda_policy: 1.0,
            lambda_est: 1.0,
            beta: 0.5,
            clip: 0.2,
            gamma: 0.99,
            gae_lambda: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LossTerms {
    pub policy: f64,
    pub value: f64,
    pub est: f64,
    pub sym: f64,
}

impl LossTerms {
    /// `L_value + λ_policy·L_policy + λ_est·L_est`.
    pub fn actor_critic(&self, c: &LossCoefficients) -> f64 {
        self.value + c.lambda_policy * self.policy + c.lambda_est * self.est
    }
}

/// `min(r·A, clip(r, 1−ε, 1+ε)·A)` for one sample.
pub fn clipped_surrogate(ratio: f64, advantage: f64, epsilon: f64) -> f64 {
    let clipped = ratio.clamp(1.0 - epsilon, 1.0 + epsilon);
    (ratio * advantage).min(clipped * advantage)
}

/// Negated mean clipped surrogate, so lower is better.
pub fn ppo_policy_loss(ratios: &[f64], advantages: &[f64], epsilon: f64) -> Result<f64> {
    check_dim("advantages", ratios.len(), advantages.len())?;
    if ratios.is_empty() {
        return Err(Error::Empty("policy batch"));
    }
    let sum: f64 = ratios
        .iter()
        .zip(advantages)
        .map(|(&r, &a)| clipped_surrogate(r, a, epsilon))
        .sum();
    Ok(-sum / ratios.len() as f64)
}

/// Derivative of the per-sample surrogate with respect to the ratio.
pub(crate) fn clipped_surrogate_grad(ratio: f64, advantage: f64, epsilon: f64) -> f64 {
    let clipped = ratio.clamp(1.0 - epsilon, 1.0 + epsilon);
    if ratio * advantage <= clipped * advantage {
        advantage
    } else {
        0.0
    }
}

/// `Σ_k γ^k r_{t+k}`, treating the end of the slice as terminal.
pub fn discounted_returns(rewards: &[f64], gamma: f64) -> Vec<f64> {
    let mut out = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    for (o, r) in out.iter_mut().zip(rewards).rev() {
        acc = r + gamma * acc;
        *o = acc;
    }
    out
}

/// GAE advantages with a zero bootstrap after the last step.
pub fn gae_advantages(
    rewards: &[f64],
    values: &[f64],
    gamma: f64,
    lambda: f64,
) -> Result<Vec<f64>> {
    check_dim("values", rewards.len(), values.len())?;
    let mut out = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    for t in (0..rewards.len()).rev() {
        let next = values.get(t + 1).copied().unwrap_or(0.0);
        let delta = rewards[t] + gamma * next - values[t];
        acc = delta + gamma * lambda * acc;
        out[t] = acc;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueTargets {
    pub returns: Vec<f64>,
    pub advantages: Vec<f64>,
    /// `mean((V − V^targ)²)` at the given values.
    pub value_loss: f64,
}

/// Discounted returns as value targets and `return − V` as advantages.
pub fn value_and_advantage(rewards: &[f64], values: &[f64], gamma: f64) -> Result<ValueTargets> {
    check_dim("values", rewards.len(), values.len())?;
    let returns = discounted_returns(rewards, gamma);
    let advantages: Vec<f64> = returns.iter().zip(values).map(|(g, v)| g - v).collect();
    let value_loss = mean_squared(values, &returns)?;
    Ok(ValueTargets {
        returns,
        advantages,
        value_loss,
    })
}

/// Like [`value_and_advantage`], but with GAE advantages when `gae_lambda`
/// is set; targets become `A + V` in that case.
pub fn value_targets(
    rewards: &[f64],
    values: &[f64],
    coeffs: &LossCoefficients,
) -> Result<ValueTargets> {
    match coeffs.gae_lambda {
        None => value_and_advantage(rewards, values, coeffs.gamma),
        Some(lambda) => {
            let advantages = gae_advantages(rewards, values, coeffs.gamma, lambda)?;
            let returns: Vec<f64> = advantages.iter().zip(values).map(|(a, v)| a + v).collect();
            let value_loss = mean_squared(values, &returns)?;
            Ok(ValueTargets {
                returns,
                advantages,
                value_loss,
            })
        }
    }
}

pub fn mean_squared(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dim("mean squared error operand", a.len(), b.len())?;
    if a.is_empty() {
        return Err(Error::Empty("mean squared error"));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64)
}

/// Mean squared error over every element of the batch.
pub fn estimation_loss(estimates: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<f64> {
    check_dim("estimation batch", targets.len(), estimates.len())?;
    if estimates.is_empty() {
        return Err(Error::Empty("estimation batch"));
    }
    let mut sum = 0.0;
    let mut n = 0usize;
    for (e, t) in estimates.iter().zip(targets) {
        check_dim("estimate", t.len(), e.len())?;
        sum += e.iter().zip(t).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
        n += e.len();
    }
    if n == 0 {
        return Err(Error::Empty("estimate"));
    }
    Ok(sum / n as f64)
}

/// `L_value + λ_policy·L_policy + λ_est·L_est + β·L_sym`.
pub fn total_objective(terms: &LossTerms, coeffs: &LossCoefficients) -> Result<f64> {
    for (name, v) in [
        ("policy loss", terms.policy),
        ("value loss", terms.value),
        ("estimation loss", terms.est),
        ("symmetry loss", terms.sym),
    ] {
        if !v.is_finite() {
            return Err(Error::NonFinite(name));
        }
    }
    Ok(terms.actor_critic(coeffs) + coeffs.beta * terms.sym)
}
