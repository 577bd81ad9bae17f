//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::collections::BTreeMap;

use humanoid_wbc::command::CommandVector;
use humanoid_wbc::learn::{ActorCritic, Batch};
use humanoid_wbc::step::RobotStep;
use nalgebra::{Matrix6, Vector6};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
pub struct RewardFixture {
    pub name: String,
    pub step: RobotStep,
    pub command: CommandVector,
    pub raw: BTreeMap<String, f64>,
    pub weighted: BTreeMap<String, f64>,
    pub total: f64,
}

pub fn reward_fixtures() -> Vec<RewardFixture> {
    serde_json::from_str(include_str!("../fixtures/reward_fixtures.json"))
        .expect("fixture file parses")
}

/// Absolute below magnitude 1, relative above.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// Coefficients of the quintic on `[x0, x1]` from `z0` to `z1` with zero
/// end velocity and acceleration, by a direct 6×6 solve.
pub fn quintic_coefficients(x0: f64, x1: f64, z0: f64, z1: f64) -> [f64; 6] {
    let mut m = Matrix6::zeros();
    let mut rhs = Vector6::zeros();
    for (r, (x, z)) in [(x0, z0), (x1, z1)].into_iter().enumerate() {
        for k in 0..6 {
            let kf = k as f64;
            m[(3 * r, k)] = x.powi(k as i32);
            if k >= 1 {
                m[(3 * r + 1, k)] = kf * x.powi(k as i32 - 1);
            }
            if k >= 2 {
                m[(3 * r + 2, k)] = kf * (kf - 1.0) * x.powi(k as i32 - 2);
            }
        }
        rhs[3 * r] = z;
    }
    let c = m.lu().solve(&rhs).expect("boundary system is regular");
    [c[0], c[1], c[2], c[3], c[4], c[5]]
}

pub fn poly(c: &[f64; 6], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

/// Swing height from two independently solved quintics.
pub fn oracle_swing_height(phi_bar: f64, start_z: f64, apex: f64, end_z: f64) -> f64 {
    if phi_bar < 0.5 {
        0.0
    } else if phi_bar <= 0.75 {
        poly(&quintic_coefficients(0.5, 0.75, start_z, apex), phi_bar)
    } else {
        poly(&quintic_coefficients(0.75, 1.0, apex, end_z), phi_bar)
    }
}

pub fn random_batch(net: &ActorCritic, n: usize, rng: &mut ChaCha8Rng) -> Batch {
    let d = *net.dims();
    let mut b = Batch::default();
    // ratios chosen away from the clip kinks at 1 ± 0.2
    let ratios = [0.7, 0.9, 1.1, 1.35];
    for k in 0..n {
        let obs: Vec<f64> = (0..d.actor_input())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let (action, lp) = net.sample_action(&obs, rng).unwrap();
        b.old_log_probs.push(lp - f64::ln(ratios[k % ratios.len()]));
        b.actions.push(action);
        b.est_targets.push(
            (0..d.estimate)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect(),
        );
        b.critic_obs
            .push((0..d.critic).map(|_| rng.random_range(-1.0..1.0)).collect());
        b.advantages.push(if k % 2 == 0 { 0.8 } else { -0.6 });
        b.returns.push(rng.random_range(-1.0..1.0));
        b.actor_obs.push(obs);
    }
    b
}
