//! Walks the oracle robot with a lagged body-height command and upper-body
//! intervention, then reports tracking metrics and writes curves.
//!
//! Usage: `oracle_rollout [output dir]`

use humanoid_wbc::command::{Channel, CommandVector};
use humanoid_wbc::gait::GaitPreset;
use humanoid_wbc::metrics::tracking_error;
use humanoid_wbc::rollout::{
    export_curves, lag_mean_error, run_oracle_rollout, InterventionSettings, OracleConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cmd = CommandVector::defaults(GaitPreset::walking());
    cmd.set(Channel::Vx, 1.0);
    cmd.set(Channel::BodyHeight, -0.2);
    let mut cfg = OracleConfig::new(cmd, 1000);
    cfg.lag = 0.1;
    cfg.seed = 1;
    cfg.intervention = Some(InterventionSettings::default());
    let log = run_oracle_rollout(&cfg)?;

    let r = tracking_error(&log.steps(), &log.commands())?;
    println!("steps {}  cycles {}", r.steps, r.cycles);
    println!(
        "E_vx {:.5}  E_h {:.5}  (closed form {:.5})",
        r.e_vx,
        r.e_h,
        lag_mean_error(0.2, cfg.lag_retention(), r.steps)
    );
    println!(
        "E_f {:?}  E_l {:?}  D {:.3} m",
        r.e_f, r.e_l, r.foot_displacement
    );
    let on = log
        .records
        .iter()
        .filter(|rec| rec.step.intervention)
        .count();
    println!("intervention active on {on} of {} steps", log.len());

    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "oracle_curves".into());
    for p in export_curves(&log, dir.as_ref(), true)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}
