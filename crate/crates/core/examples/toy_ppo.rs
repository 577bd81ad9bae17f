//! Trains the point-mass velocity tracker with the full PPO objective and
//! prints held-out tracking error per epoch.
//!
//! Usage: `toy_ppo [seed] [beta]`

use humanoid_wbc::rollout::{run_toy_ppo, ToyConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(1);
    let mut config = ToyConfig::default();
    if let Some(beta) = std::env::args().nth(2) {
        config.coefficients.beta = beta.parse()?;
    }
    let report = run_toy_ppo(&config, seed)?;
    println!(
        "initial  mean|v-v_cmd| {:.4}  sym {:.5}",
        report.initial.mean_abs_error, report.initial.sym_loss
    );
    for e in &report.epochs {
        println!(
            "epoch {:>3}  reward {:.3}  mean|v-v_cmd| {:.4}  sym {:.5}",
            e.epoch, e.mean_reward, e.eval.mean_abs_error, e.eval.sym_loss
        );
    }
    if let Some(epoch) = report.diverged_at {
        println!("diverged at epoch {epoch}");
    }
    Ok(())
}
