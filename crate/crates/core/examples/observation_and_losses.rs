//! Builds actor/critic observations from oracle steps, runs the micro
//! network on them and evaluates every term of the training objective.

use humanoid_wbc::command::CommandVector;
use humanoid_wbc::gait::GaitPreset;
use humanoid_wbc::layout::JointLayout;
use humanoid_wbc::learn::{ActorCritic, Batch, LossCoefficients, NetDims, NetSpec, SymmetryMaps};
use humanoid_wbc::mirror::MirrorMap;
use humanoid_wbc::rollout::{OracleConfig, OracleRobot};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut robot = OracleRobot::new(
        OracleConfig::new(CommandVector::defaults(GaitPreset::walking()), 16),
        JointLayout::h1(),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let net = ActorCritic::new(&NetSpec::micro(), NetDims::humanoid(), -0.5, &mut rng)?;
    let mut batch = Batch::default();
    for _ in 0..16 {
        let rec = robot.step()?;
        let obs = robot.observe(&rec)?;
        let actor = obs.actor_input();
        let (action, lp) = net.sample_action(&actor, &mut rng)?;
        batch.actor_obs.push(actor);
        batch.critic_obs.push(obs.critic_input());
        batch.actions.push(action);
        batch.old_log_probs.push(lp);
        batch.advantages.push(0.0);
        batch.returns.push(1.0);
        batch.est_targets.push(obs.key_state.to_vec());
    }
    println!(
        "actor input {}, critic input {}, {} parameters",
        batch.actor_obs[0].len(),
        batch.critic_obs[0].len(),
        net.param_count()
    );
    println!(
        "estimate at last step {:?}",
        net.estimate(batch.actor_obs.last().unwrap())?
    );

    let m = MirrorMap::h1();
    let maps = SymmetryMaps {
        observation: m.observation_map().clone(),
        action: m.action_map().clone(),
    };
    let eval = net.loss_and_grad(&batch, &LossCoefficients::default(), Some(&maps))?;
    let t = eval.terms;
    println!(
        "policy {:.4}  value {:.4}  estimation {:.4}  symmetry {:.4}  total {:.4}",
        t.policy, t.value, t.est, t.sym, eval.total
    );
    let norm = eval.grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    println!("gradient norm {norm:.4}");
    Ok(())
}
