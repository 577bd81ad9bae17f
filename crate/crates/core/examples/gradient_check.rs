//! Compares analytic gradients of the full objective with central
//! differences, tensor by tensor.

use humanoid_wbc::learn::{
    gradient_check, ActorCritic, Batch, LossCoefficients, NetDims, NetSpec, SymmetryMaps,
};
use humanoid_wbc::mirror::MirrorMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let net = ActorCritic::new(&NetSpec::micro(), NetDims::humanoid(), -0.5, &mut rng)?;
    let d = *net.dims();
    let mut batch = Batch::default();
    for k in 0..4 {
        let obs: Vec<f64> = (0..d.actor_input())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let (action, lp) = net.sample_action(&obs, &mut rng)?;
        // keep probability ratios off the clip boundaries
        batch
            .old_log_probs
            .push(lp - [0.7f64, 0.9, 1.1, 1.35][k].ln());
        batch.actions.push(action);
        batch
            .critic_obs
            .push((0..d.critic).map(|_| rng.random_range(-1.0..1.0)).collect());
        batch.est_targets.push(
            (0..d.estimate)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect(),
        );
        batch.advantages.push(if k % 2 == 0 { 0.8 } else { -0.6 });
        batch.returns.push(rng.random_range(-1.0..1.0));
        batch.actor_obs.push(obs);
    }
    let m = MirrorMap::h1();
    let maps = SymmetryMaps {
        observation: m.observation_map().clone(),
        action: m.action_map().clone(),
    };
    let report = gradient_check(
        &net,
        &batch,
        &LossCoefficients::default(),
        Some(&maps),
        1e-5,
    )?;
    for (name, err) in &report.tensors {
        println!("{name:<28} {err:.2e}");
    }
    println!("max relative error {:.2e}", report.max_relative_error);
    Ok(())
}
