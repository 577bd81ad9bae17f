//! PPO on a 1-D point mass: observe `(v, v_cmd)`, output an acceleration,
//! earn `exp(−(v_cmd − v)²/0.2)`. Small enough to train in seconds, and it
//! runs every term of the objective including the symmetry loss.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learn::{
    value_targets, ActorCritic, Adam, Batch, LossCoefficients, LossTerms, NetDims, NetSpec,
    SymmetryMaps,
};
use crate::mirror::SignedPermutation;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToyConfig {
    pub epochs: usize,
    pub episodes_per_epoch: usize,
    pub horizon: usize,
    /// Integration step of the point mass (s).
    pub dt: f64,
    pub ppo_passes: usize,
    pub minibatches: usize,
    pub learning_rate: f64,
    pub init_log_std: f64,
    pub max_grad_norm: f64,
    pub eval_commands: usize,
    pub coefficients: LossCoefficients,
    pub net: NetSpec,
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self {
            epochs: 50,
            episodes_per_epoch: 32,
            horizon: 50,
            dt: 0.1,
            ppo_passes: 5,
            minibatches: 4,
            learning_rate: 3e-3,
            init_log_std: -0.5,
            max_grad_norm: 1.0,
            eval_commands: 32,
            // The point mass has no time input, so a short discount keeps the
            // truncated-horizon returns learnable by the critic.
            coefficients: LossCoefficients {
                gamma: 0.9,
                gae_lambda: Some(0.95),
                ..LossCoefficients::default()
            },
            net: NetSpec::micro(),
        }
    }
}

impl ToyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.episodes_per_epoch == 0
            || self.horizon == 0
            || self.minibatches == 0
            || self.eval_commands == 0
        {
            return Err(Error::param(
                "toy config",
                "episode, horizon, minibatch and eval counts must be >= 1",
            ));
        }
        if !(self.dt > 0.0 && self.learning_rate > 0.0 && self.max_grad_norm > 0.0) {
            return Err(Error::param(
                "toy config",
                "dt, learning rate and grad norm must be > 0",
            ));
        }
        if self.minibatches > self.episodes_per_epoch * self.horizon {
            return Err(Error::param("minibatches", "more minibatches than samples"));
        }
        Ok(())
    }
}

pub fn toy_dims() -> NetDims {
    NetDims {
        history: 1,
        proprio: 1,
        command: 1,
        critic: 2,
        action: 1,
        estimate: 1,
    }
}

/// Reflection `v → −v`, `v_cmd → −v_cmd`, `a → −a`.
pub fn toy_symmetry() -> SymmetryMaps {
    SymmetryMaps {
        observation: SignedPermutation::signs(vec![-1.0, -1.0]).expect("valid signs"),
        action: SignedPermutation::signs(vec![-1.0]).expect("valid signs"),
    }
}

fn reward(v: f64, v_cmd: f64) -> f64 {
    (-(v_cmd - v).powi(2) / 0.2).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalStats {
    /// Mean `|v − v_cmd|` over every step of the held-out episodes.
    pub mean_abs_error: f64,
    /// Batch-mean symmetry loss over the visited observations.
    pub sym_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub mean_reward: f64,
    pub losses: LossTerms,
    pub eval: EvalStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    pub seed: u64,
    pub initial: EvalStats,
    pub epochs: Vec<EpochStats>,
    pub final_eval: EvalStats,
    /// Epoch at which a non-finite loss stopped training.
    pub diverged_at: Option<usize>,
}

/// Deterministic rollouts on evenly spaced commands in `[−1, 1]`.
pub fn evaluate(net: &ActorCritic, config: &ToyConfig) -> Result<EvalStats> {
    let maps = toy_symmetry();
    let n = config.eval_commands;
    let mut err = 0.0;
    let mut sym = 0.0;
    let mut count = 0usize;
    for j in 0..n {
        let v_cmd = -1.0 + 2.0 * (j as f64 + 0.5) / n as f64;
        let mut v = 0.0;
        for _ in 0..config.horizon {
            let obs = [v, v_cmd];
            let a = net.act_mean(&obs)?[0];
            let mirrored = maps
                .action
                .apply(&net.act_mean(&maps.observation.apply(&obs)?)?)?[0];
            sym += (a - mirrored).powi(2);
            v += a * config.dt;
            err += (v - v_cmd).abs();
            count += 1;
        }
    }
    let stats = EvalStats {
        mean_abs_error: err / count as f64,
        sym_loss: sym / count as f64,
    };
    if !(stats.mean_abs_error.is_finite() && stats.sym_loss.is_finite()) {
        return Err(Error::NonFinite("toy evaluation"));
    }
    Ok(stats)
}

fn collect(net: &ActorCritic, config: &ToyConfig, rng: &mut ChaCha8Rng) -> Result<(Batch, f64)> {
    let mut batch = Batch::default();
    let mut reward_sum = 0.0;
    for _ in 0..config.episodes_per_epoch {
        let v_cmd: f64 = rng.random_range(-1.0..=1.0);
        let mut v = 0.0;
        let mut rewards = Vec::with_capacity(config.horizon);
        let mut values = Vec::with_capacity(config.horizon);
        for _ in 0..config.horizon {
            let obs = vec![v, v_cmd];
            let (action, lp) = net.sample_action(&obs, rng)?;
            values.push(net.value(&obs)?);
            batch.est_targets.push(vec![v]);
            batch.critic_obs.push(obs.clone());
            batch.actor_obs.push(obs);
            batch.old_log_probs.push(lp);
            v += action[0] * config.dt;
            batch.actions.push(action);
            let r = reward(v, v_cmd);
            reward_sum += r;
            rewards.push(r);
        }
        let targets = value_targets(&rewards, &values, &config.coefficients)?;
        batch.advantages.extend(targets.advantages);
        batch.returns.extend(targets.returns);
    }
    let n = batch.advantages.len() as f64;
    let mean = batch.advantages.iter().sum::<f64>() / n;
    let std = (batch
        .advantages
        .iter()
        .map(|a| (a - mean).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    for a in &mut batch.advantages {
        *a = (*a - mean) / (std + 1e-8);
    }
    Ok((batch, reward_sum / n))
}

fn minibatch(batch: &Batch, idx: &[usize]) -> Batch {
    let pick = |v: &Vec<Vec<f64>>| idx.iter().map(|&i| v[i].clone()).collect();
    let pick1 = |v: &Vec<f64>| idx.iter().map(|&i| v[i]).collect();
    Batch {
        actor_obs: pick(&batch.actor_obs),
        critic_obs: pick(&batch.critic_obs),
        actions: pick(&batch.actions),
        old_log_probs: pick1(&batch.old_log_probs),
        advantages: pick1(&batch.advantages),
        returns: pick1(&batch.returns),
        est_targets: pick(&batch.est_targets),
    }
}

/// Trains from a seeded initialization and reports per-epoch statistics.
/// With `epochs == 0` the report holds only the initial policy's numbers.
pub fn run_toy_ppo(config: &ToyConfig, seed: u64) -> Result<TrainingReport> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = ActorCritic::new(&config.net, toy_dims(), config.init_log_std, &mut rng)?;
    let maps = toy_symmetry();
    let use_maps = (config.coefficients.beta != 0.0).then_some(&maps);
    let mut opt = Adam::new(net.param_count(), config.learning_rate);
    let initial = evaluate(&net, config)?;
    let mut report = TrainingReport {
        seed,
        initial,
        epochs: Vec::new(),
        final_eval: initial,
        diverged_at: None,
    };

    for epoch in 0..config.epochs {
        // linear learning-rate decay to zero over the budget
        opt.lr = config.learning_rate * (1.0 - epoch as f64 / config.epochs as f64);
        let (batch, mean_reward) = collect(&net, config, &mut rng)?;
        let n = batch.len();
        let mut order: Vec<usize> = (0..n).collect();
        let mut last = LossTerms::default();
        let mut diverged = false;
        'passes: for _ in 0..config.ppo_passes {
            // Fisher-Yates with the run's stream keeps shuffles reproducible.
            for i in (1..n).rev() {
                order.swap(i, rng.random_range(0..=i));
            }
            for chunk in order.chunks(n.div_ceil(config.minibatches)) {
                let mb = minibatch(&batch, chunk);
                let eval = match net.loss_and_grad(&mb, &config.coefficients, use_maps) {
                    Ok(e) => e,
                    Err(e) if e.is_numeric() => {
                        diverged = true;
                        break 'passes;
                    }
                    Err(e) => return Err(e),
                };
                last = eval.terms;
                let mut grad = eval.grad;
                let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
                if norm > config.max_grad_norm {
                    let s = config.max_grad_norm / norm;
                    grad.iter_mut().for_each(|g| *g *= s);
                }
                let mut params = net.params();
                opt.step(&mut params, &grad)?;
                net.set_params(&params)?;
            }
        }
        let eval = match evaluate(&net, config) {
            Ok(e) if !diverged => e,
            Ok(_) | Err(_) => {
                report.diverged_at = Some(epoch);
                break;
            }
        };
        report.final_eval = eval;
        report.epochs.push(EpochStats {
            epoch,
            mean_reward,
            losses: last,
            eval,
        });
    }
    Ok(report)
}
