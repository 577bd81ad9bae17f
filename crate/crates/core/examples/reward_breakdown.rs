//! Per-term rewards for a walking oracle step, with and without the
//! intervention mask.

use humanoid_wbc::command::{Channel, CommandVector};
use humanoid_wbc::gait::GaitPreset;
use humanoid_wbc::layout::JointLayout;
use humanoid_wbc::reward::{apply_intervention_mask, compute_rewards, RewardContext, RewardGroup};
use humanoid_wbc::rollout::{OracleConfig, OracleRobot};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cmd = CommandVector::defaults(GaitPreset::walking());
    cmd.set(Channel::Vx, 0.8);
    cmd.set(Channel::BodyHeight, -0.1);
    let mut cfg = OracleConfig::new(cmd, 40);
    cfg.lag = 0.2;
    let mut robot = OracleRobot::new(cfg, JointLayout::h1())?;
    let mut rec = robot.step()?;
    for _ in 0..30 {
        rec = robot.step()?;
    }
    // pretend an external controller holds the arms away from nominal
    let layout = JointLayout::h1();
    for i in layout.upper_indices() {
        rec.step.joint_pos[i] += 0.3;
    }

    let ctx = RewardContext::new(&layout);
    let plain = compute_rewards(&rec.step, &rec.command, &ctx)?;
    let masked = apply_intervention_mask(plain.clone(), true);
    println!(
        "{:<30} {:>10} {:>12} {:>12}",
        "term", "raw", "reward", "masked"
    );
    for (a, b) in plain.terms.iter().zip(&masked.terms) {
        println!(
            "{:<30} {:>10.4} {:>12.5} {:>12.5}",
            a.term.to_string(),
            a.raw,
            a.contribution(),
            b.contribution()
        );
    }
    for g in [
        RewardGroup::Task,
        RewardGroup::Behavior,
        RewardGroup::Regularization,
    ] {
        println!("{g:?} total {:.4}", plain.group_total(g));
    }
    println!("total {:.4}, masked {:.4}", plain.total(), masked.total());
    Ok(())
}
