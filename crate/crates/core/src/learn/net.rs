//! A small dense actor-critic with hand-written backpropagation: history
//! encoder, key-state estimator, low-level policy head and critic.

use std::ops::Range;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::learn::loss::{clipped_surrogate, clipped_surrogate_grad, LossCoefficients, LossTerms};
use crate::mirror::SignedPermutation;
use crate::obs::{
    ACTION_DIM, COMMAND_DIM_WITH_INDICATOR, CRITIC_DIM, ESTIMATE_DIM, HISTORY_LEN, PROPRIO_DIM,
};

/// Hidden widths of the four sub-networks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetSpec {
    pub encoder: Vec<usize>,
    pub latent: usize,
    pub estimator: Vec<usize>,
    pub low_level: Vec<usize>,
    pub critic: Vec<usize>,
}

impl NetSpec {
    /// Full-size widths.
    pub fn reference() -> Self {
        Self {
            encoder: vec![256, 128],
            latent: 32,
            estimator: vec![64, 32],
            low_level: vec![256, 128, 64],
            critic: vec![512, 256, 128],
        }
    }

    /// Same topology with every width at most 16.
    pub fn micro() -> Self {
        Self {
            encoder: vec![16, 8],
            latent: 4,
            estimator: vec![8, 8],
            low_level: vec![16, 8, 8],
            critic: vec![16, 8],
        }
    }
}

/// Input and output sizes the networks are built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetDims {
    pub history: usize,
    pub proprio: usize,
    /// Command block plus any trailing flags (the indicator).
    pub command: usize,
    pub critic: usize,
    pub action: usize,
    pub estimate: usize,
}

impl NetDims {
    pub fn humanoid() -> Self {
        Self {
            history: HISTORY_LEN,
            proprio: PROPRIO_DIM,
            command: COMMAND_DIM_WITH_INDICATOR,
            critic: CRITIC_DIM,
            action: ACTION_DIM,
            estimate: ESTIMATE_DIM,
        }
    }

    pub fn actor_input(&self) -> usize {
        self.history * self.proprio + self.command
    }
}

fn elu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        x.exp_m1()
    }
}

fn elu_grad(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        x.exp()
    }
}

/// Dense network with ELU hidden activations and a linear output layer.
/// Parameters are one flat vector, layer by layer, weights (row-major,
/// `out × in`) then biases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

struct MlpCache {
    /// Input of every layer.
    inputs: Vec<Vec<f64>>,
    /// Pre-activation of every layer.
    pre: Vec<Vec<f64>>,
}

impl Mlp {
    pub fn zeros(sizes: Vec<usize>) -> Self {
        let n = sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum();
        Self {
            sizes,
            params: vec![0.0; n],
        }
    }

    /// Glorot-uniform weights, zero biases; the output layer is scaled by
    /// `output_gain`.
    pub fn new<R: Rng + ?Sized>(sizes: Vec<usize>, output_gain: f64, rng: &mut R) -> Self {
        let mut net = Self::zeros(sizes);
        let layers = net.layer_count();
        for l in 0..layers {
            let (w, _, fan_in, fan_out) = net.layer(l);
            let mut bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            if l + 1 == layers {
                bound *= output_gain;
            }
            for p in &mut net.params[w] {
                *p = rng.random_range(-bound..=bound);
            }
        }
        net
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        self.sizes[self.sizes.len() - 1]
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn layer_count(&self) -> usize {
        self.sizes.len() - 1
    }

    /// Weight range, bias range, fan-in and fan-out of layer `l`.
    fn layer(&self, l: usize) -> (Range<usize>, Range<usize>, usize, usize) {
        let off: usize = self.sizes[..l + 1]
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum();
        let (i, o) = (self.sizes[l], self.sizes[l + 1]);
        (off..off + i * o, off + i * o..off + i * o + o, i, o)
    }

    /// Named parameter tensors with their ranges in [`Mlp::params`].
    pub fn tensors(&self, prefix: &str) -> Vec<(String, Range<usize>)> {
        (0..self.layer_count())
            .flat_map(|l| {
                let (w, b, _, _) = self.layer(l);
                [
                    (format!("{prefix}.{l}.weight"), w),
                    (format!("{prefix}.{l}.bias"), b),
                ]
            })
            .collect()
    }

    fn forward_cache(&self, x: &[f64]) -> Result<(Vec<f64>, MlpCache)> {
        check_dim("network input", self.input_dim(), x.len())?;
        let mut cache = MlpCache {
            inputs: Vec::with_capacity(self.layer_count()),
            pre: Vec::with_capacity(self.layer_count()),
        };
        let mut a = x.to_vec();
        for l in 0..self.layer_count() {
            let (w, b, fan_in, _) = self.layer(l);
            let z: Vec<f64> = self.params[w]
                .chunks_exact(fan_in)
                .zip(&self.params[b])
                .map(|(row, bias)| row.iter().zip(&a).map(|(wi, ai)| wi * ai).sum::<f64>() + bias)
                .collect();
            let last = l + 1 == self.layer_count();
            let next = if last {
                z.clone()
            } else {
                z.iter().map(|&v| elu(v)).collect()
            };
            cache.inputs.push(a);
            cache.pre.push(z);
            a = next;
        }
        Ok((a, cache))
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward_cache(x)?.0)
    }

    /// Adds `∂L/∂θ` into `grad` and returns `∂L/∂x`.
    fn backward(&self, cache: &MlpCache, grad_out: &[f64], grad: &mut [f64]) -> Vec<f64> {
        let mut g = grad_out.to_vec();
        for l in (0..self.layer_count()).rev() {
            let (w, b, fan_in, _) = self.layer(l);
            if l + 1 != self.layer_count() {
                for (gi, z) in g.iter_mut().zip(&cache.pre[l]) {
                    *gi *= elu_grad(*z);
                }
            }
            let input = &cache.inputs[l];
            let mut g_in = vec![0.0; fan_in];
            let wrows = self.params[w.clone()].chunks_exact(fan_in);
            let grows = grad[w].chunks_exact_mut(fan_in);
            for ((row, grow), &go) in wrows.zip(grows).zip(&g) {
                for k in 0..fan_in {
                    grow[k] += go * input[k];
                    g_in[k] += go * row[k];
                }
            }
            for (gb, go) in grad[b].iter_mut().zip(&g) {
                *gb += go;
            }
            g = g_in;
        }
        g
    }
}

/// Observation and action mirrors used by the symmetry loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryMaps {
    pub observation: SignedPermutation,
    pub action: SignedPermutation,
}

/// One PPO minibatch.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Batch {
    pub actor_obs: Vec<Vec<f64>>,
    pub critic_obs: Vec<Vec<f64>>,
    pub actions: Vec<Vec<f64>>,
    pub old_log_probs: Vec<f64>,
    pub advantages: Vec<f64>,
    pub returns: Vec<f64>,
    pub est_targets: Vec<Vec<f64>>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.actor_obs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actor_obs.is_empty()
    }

    fn validate(&self, dims: &NetDims) -> Result<()> {
        let n = self.len();
        if n == 0 {
            return Err(Error::Empty("batch"));
        }
        check_dim("critic batch", n, self.critic_obs.len())?;
        check_dim("action batch", n, self.actions.len())?;
        check_dim("log-prob batch", n, self.old_log_probs.len())?;
        check_dim("advantage batch", n, self.advantages.len())?;
        check_dim("return batch", n, self.returns.len())?;
        check_dim("estimate batch", n, self.est_targets.len())?;
        for k in 0..n {
            check_dim(
                "actor observation",
                dims.actor_input(),
                self.actor_obs[k].len(),
            )?;
            check_dim("critic observation", dims.critic, self.critic_obs[k].len())?;
            check_dim("action", dims.action, self.actions[k].len())?;
            check_dim("estimate target", dims.estimate, self.est_targets[k].len())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossEvaluation {
    pub terms: LossTerms,
    pub total: f64,
    /// Gradient of `total` in [`ActorCritic::params`] layout.
    pub grad: Vec<f64>,
}

struct ActorPass {
    mean: Vec<f64>,
    estimate: Vec<f64>,
    enc: MlpCache,
    est: MlpCache,
    low: MlpCache,
}

/// Gaussian policy with a state-independent learned log standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActorCritic {
    dims: NetDims,
    encoder: Mlp,
    estimator: Mlp,
    low_level: Mlp,
    critic: Mlp,
    log_std: Vec<f64>,
}

impl ActorCritic {
    pub fn new<R: Rng + ?Sized>(
        spec: &NetSpec,
        dims: NetDims,
        init_log_std: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let net = |input: usize, hidden: &[usize], out: usize, gain: f64, rng: &mut R| {
            let mut sizes = vec![input];
            sizes.extend_from_slice(hidden);
            sizes.push(out);
            Mlp::new(sizes, gain, rng)
        };
        if [
            dims.history,
            dims.proprio,
            dims.critic,
            dims.action,
            spec.latent,
        ]
        .contains(&0)
        {
            return Err(Error::param("network dims", "sizes must be positive"));
        }
        let hist = dims.history * dims.proprio;
        let low_in = spec.latent + dims.estimate + dims.proprio + dims.command;
        Ok(Self {
            dims,
            encoder: net(hist, &spec.encoder, spec.latent, 1.0, rng),
            estimator: net(hist, &spec.estimator, dims.estimate, 1.0, rng),
            low_level: net(low_in, &spec.low_level, dims.action, 0.1, rng),
            critic: net(dims.critic, &spec.critic, 1, 1.0, rng),
            log_std: vec![init_log_std; dims.action],
        })
    }

    /// Every weight and bias zero.
    pub fn zeros(spec: &NetSpec, dims: NetDims) -> Self {
        let mk = |input: usize, hidden: &[usize], out: usize| {
            let mut sizes = vec![input];
            sizes.extend_from_slice(hidden);
            sizes.push(out);
            Mlp::zeros(sizes)
        };
        let hist = dims.history * dims.proprio;
        Self {
            dims,
            encoder: mk(hist, &spec.encoder, spec.latent),
            estimator: mk(hist, &spec.estimator, dims.estimate),
            low_level: mk(
                spec.latent + dims.estimate + dims.proprio + dims.command,
                &spec.low_level,
                dims.action,
            ),
            critic: mk(dims.critic, &spec.critic, 1),
            log_std: vec![0.0; dims.action],
        }
    }

    pub fn dims(&self) -> &NetDims {
        &self.dims
    }

    pub fn log_std(&self) -> &[f64] {
        &self.log_std
    }

    fn parts(&self) -> [(&str, &[f64]); 5] {
        [
            ("encoder", self.encoder.params()),
            ("estimator", self.estimator.params()),
            ("low_level", self.low_level.params()),
            ("critic", self.critic.params()),
            ("log_std", &self.log_std),
        ]
    }

    pub fn param_count(&self) -> usize {
        self.parts().iter().map(|(_, p)| p.len()).sum()
    }

    pub fn params(&self) -> Vec<f64> {
        self.parts()
            .iter()
            .flat_map(|(_, p)| p.iter().copied())
            .collect()
    }

    pub fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        check_dim("parameter vector", self.param_count(), flat.len())?;
        let mut rest = flat;
        for dst in [
            self.encoder.params_mut(),
            self.estimator.params_mut(),
            self.low_level.params_mut(),
            self.critic.params_mut(),
            &mut self.log_std,
        ] {
            let (head, tail) = rest.split_at(dst.len());
            dst.copy_from_slice(head);
            rest = tail;
        }
        Ok(())
    }

    /// Named tensors with their ranges in the flat parameter vector.
    pub fn tensors(&self) -> Vec<(String, Range<usize>)> {
        let mut out = Vec::new();
        let mut off = 0;
        for (net, name) in [
            (&self.encoder, "encoder"),
            (&self.estimator, "estimator"),
            (&self.low_level, "low_level"),
            (&self.critic, "critic"),
        ] {
            for (n, r) in net.tensors(name) {
                out.push((n, r.start + off..r.end + off));
            }
            off += net.params().len();
        }
        out.push(("log_std".to_string(), off..off + self.log_std.len()));
        out
    }

    fn actor_pass(&self, obs: &[f64]) -> Result<ActorPass> {
        check_dim("actor observation", self.dims.actor_input(), obs.len())?;
        let hist_len = self.dims.history * self.dims.proprio;
        let history = &obs[..hist_len];
        let newest = &history[hist_len - self.dims.proprio..];
        let (z, enc) = self.encoder.forward_cache(history)?;
        let (estimate, est) = self.estimator.forward_cache(history)?;
        let mut input = z;
        input.extend_from_slice(&estimate);
        input.extend_from_slice(newest);
        input.extend_from_slice(&obs[hist_len..]);
        let (mean, low) = self.low_level.forward_cache(&input)?;
        Ok(ActorPass {
            mean,
            estimate,
            enc,
            est,
            low,
        })
    }

    /// Deterministic (mean) action.
    pub fn act_mean(&self, obs: &[f64]) -> Result<Vec<f64>> {
        Ok(self.actor_pass(obs)?.mean)
    }

    pub fn estimate(&self, obs: &[f64]) -> Result<Vec<f64>> {
        Ok(self.actor_pass(obs)?.estimate)
    }

    pub fn value(&self, critic_obs: &[f64]) -> Result<f64> {
        Ok(self.critic.forward(critic_obs)?[0])
    }

    pub fn log_prob(&self, mean: &[f64], action: &[f64]) -> Result<f64> {
        check_dim("action", mean.len(), action.len())?;
        let half_log_2pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
        Ok(mean
            .iter()
            .zip(action)
            .zip(&self.log_std)
            .map(|((m, a), ls)| {
                let u = (a - m) / ls.exp();
                -0.5 * u * u - ls - half_log_2pi
            })
            .sum())
    }

    /// Samples an action, returning it with its log-probability.
    pub fn sample_action<R: Rng + ?Sized>(
        &self,
        obs: &[f64],
        rng: &mut R,
    ) -> Result<(Vec<f64>, f64)> {
        let mean = self.act_mean(obs)?;
        let action: Vec<f64> = mean
            .iter()
            .zip(&self.log_std)
            .map(|(m, ls)| m + ls.exp() * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let lp = self.log_prob(&mean, &action)?;
        Ok((action, lp))
    }

    /// Backpropagates through one actor pass given `∂L/∂mean` and
    /// `∂L/∂estimate`.
    fn actor_backward(&self, pass: &ActorPass, g_mean: &[f64], g_est: &[f64], grad: &mut [f64]) {
        let (enc_n, est_n, low_n) = (
            self.encoder.params().len(),
            self.estimator.params().len(),
            self.low_level.params().len(),
        );
        let (g_enc, rest) = grad.split_at_mut(enc_n);
        let (g_estp, rest) = rest.split_at_mut(est_n);
        let g_low = &mut rest[..low_n];
        let g_in = self.low_level.backward(&pass.low, g_mean, g_low);
        let latent = self.encoder.output_dim();
        let mut ge = g_in[latent..latent + self.dims.estimate].to_vec();
        for (a, b) in ge.iter_mut().zip(g_est) {
            *a += b;
        }
        self.encoder.backward(&pass.enc, &g_in[..latent], g_enc);
        self.estimator.backward(&pass.est, &ge, g_estp);
    }

    /// Loss terms, total objective and its gradient. The symmetry loss is
    /// the batch mean of `‖μ(o) − F_a(μ(F_o(o)))‖²` and is zero without
    /// maps.
    pub fn loss_and_grad(
        &self,
        batch: &Batch,
        coeffs: &LossCoefficients,
        maps: Option<&SymmetryMaps>,
    ) -> Result<LossEvaluation> {
        batch.validate(&self.dims)?;
        let n = batch.len() as f64;
        let mut grad = vec![0.0; self.param_count()];
        let mut terms = LossTerms::default();
        let critic_off = self.param_count() - self.log_std.len() - self.critic.params().len();
        let std_off = self.param_count() - self.log_std.len();
        let est_scale = 1.0 / (n * self.dims.estimate.max(1) as f64);

        for k in 0..batch.len() {
            let pass = self.actor_pass(&batch.actor_obs[k])?;
            let action = &batch.actions[k];

            // policy
            let lp = self.log_prob(&pass.mean, action)?;
            let ratio = (lp - batch.old_log_probs[k]).exp();
            let adv = batch.advantages[k];
            terms.policy -= clipped_surrogate(ratio, adv, coeffs.clip) / n;
            let d_lp =
                -coeffs.lambda_policy * clipped_surrogate_grad(ratio, adv, coeffs.clip) * ratio / n;
            let mut g_mean = vec![0.0; self.dims.action];
            for j in 0..self.dims.action {
                let var = (2.0 * self.log_std[j]).exp();
                let d = action[j] - pass.mean[j];
                g_mean[j] = d_lp * d / var;
                grad[std_off + j] += d_lp * (d * d / var - 1.0);
            }

            // estimation
            let mut g_est = vec![0.0; self.dims.estimate];
            for (j, (e, t)) in pass.estimate.iter().zip(&batch.est_targets[k]).enumerate() {
                terms.est += (e - t).powi(2) * est_scale;
                g_est[j] = coeffs.lambda_est * 2.0 * (e - t) * est_scale;
            }

            // symmetry
            if let Some(m) = maps {
                let mirrored = self.actor_pass(&m.observation.apply(&batch.actor_obs[k])?)?;
                let back = m.action.apply(&mirrored.mean)?;
                let diff: Vec<f64> = pass.mean.iter().zip(&back).map(|(a, b)| a - b).collect();
                terms.sym += diff.iter().map(|d| d * d).sum::<f64>() / n;
                let scale = coeffs.beta * 2.0 / n;
                for (g, d) in g_mean.iter_mut().zip(&diff) {
                    *g += scale * d;
                }
                // F_a is a symmetric matrix, so its transpose is itself.
                let g_mirror: Vec<f64> =
                    m.action.apply(&diff)?.iter().map(|d| -scale * d).collect();
                self.actor_backward(
                    &mirrored,
                    &g_mirror,
                    &vec![0.0; self.dims.estimate],
                    &mut grad,
                );
            }
            self.actor_backward(&pass, &g_mean, &g_est, &mut grad);

            // value
            let (v, cache) = self.critic.forward_cache(&batch.critic_obs[k])?;
            let dv = v[0] - batch.returns[k];
            terms.value += dv * dv / n;
            self.critic
                .backward(&cache, &[2.0 * dv / n], &mut grad[critic_off..std_off]);
        }
        let total = crate::learn::loss::total_objective(&terms, coeffs)?;
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("gradient"));
        }
        Ok(LossEvaluation { terms, total, grad })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradCheckReport {
    /// Largest relative error per named tensor.
    pub tensors: Vec<(String, f64)>,
    pub max_relative_error: f64,
}

/// Denominator floor of the relative error. Central differences with
/// `h = 1e-5` carry roughly `1e-10` of rounding noise, so gradients
/// smaller than this are compared at that absolute level.
pub const GRAD_CHECK_FLOOR: f64 = 1e-5;

/// Compares the analytic gradient of the total objective with central
/// differences of step `h` for every parameter.
pub fn gradient_check(
    net: &ActorCritic,
    batch: &Batch,
    coeffs: &LossCoefficients,
    maps: Option<&SymmetryMaps>,
    h: f64,
) -> Result<GradCheckReport> {
    let analytic = net.loss_and_grad(batch, coeffs, maps)?.grad;
    let base = net.params();
    let mut probe = net.clone();
    let mut eval = |params: &[f64]| -> Result<f64> {
        probe.set_params(params)?;
        Ok(probe.loss_and_grad(batch, coeffs, maps)?.total)
    };
    let mut tensors = Vec::new();
    let mut worst = 0.0f64;
    let mut p = base.clone();
    for (name, range) in net.tensors() {
        let mut tensor_worst = 0.0f64;
        for i in range {
            p[i] = base[i] + h;
            let plus = eval(&p)?;
            p[i] = base[i] - h;
            let minus = eval(&p)?;
            p[i] = base[i];
            let numeric = (plus - minus) / (2.0 * h);
            let a = analytic[i];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(GRAD_CHECK_FLOOR);
            tensor_worst = tensor_worst.max(rel);
        }
        worst = worst.max(tensor_worst);
        tensors.push((name, tensor_worst));
    }
    Ok(GradCheckReport {
        tensors,
        max_relative_error: worst,
    })
}

/// Adam over a flat parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u32,
}

impl Adam {
    pub fn new(n: usize, lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) -> Result<()> {
        check_dim("gradient", self.m.len(), grad.len())?;
        check_dim("parameters", self.m.len(), params.len())?;
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            params[i] -= self.lr * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + self.eps);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_net_zero_output() {
        let net = ActorCritic::zeros(&NetSpec::micro(), NetDims::humanoid());
        let obs = vec![0.0; NetDims::humanoid().actor_input()];
        assert_eq!(net.act_mean(&obs).unwrap(), vec![0.0; ACTION_DIM]);
        assert_eq!(net.value(&vec![0.0; CRITIC_DIM]).unwrap(), 0.0);
    }

    #[test]
    fn shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let net = ActorCritic::new(&NetSpec::micro(), NetDims::humanoid(), -1.0, &mut rng).unwrap();
        let obs = vec![0.1; NetDims::humanoid().actor_input()];
        assert_eq!(net.act_mean(&obs).unwrap().len(), 19);
        assert_eq!(net.estimate(&obs).unwrap().len(), ESTIMATE_DIM);
        assert!(net.act_mean(&obs[1..]).is_err());
        let p = net.params();
        let mut other = net.clone();
        other.set_params(&p).unwrap();
        assert_eq!(other, net);
        let covered: usize = net.tensors().iter().map(|(_, r)| r.len()).sum();
        assert_eq!(covered, net.param_count());
    }

    #[test]
    fn reference_widths() {
        let s = NetSpec::reference();
        assert_eq!(s.encoder, vec![256, 128]);
        assert_eq!(s.estimator, vec![64, 32]);
        assert_eq!(s.low_level, vec![256, 128, 64]);
        assert_eq!(s.critic, vec![512, 256, 128]);
    }

    #[test]
    fn adam_minimizes_quadratic() {
        let mut x = vec![3.0, -2.0];
        let mut opt = Adam::new(2, 0.1);
        for _ in 0..500 {
            let g: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
            opt.step(&mut x, &g).unwrap();
        }
        assert!(x.iter().all(|v| v.abs() < 1e-2));
    }
}
