//! Mirrors an action, checks the involution, and compares the symmetry
//! loss of a plain and a symmetrized linear policy.

use humanoid_wbc::layout::JointLayout;
use humanoid_wbc::mirror::{mirror_action, mirror_observation, symmetry_loss, MirrorMap};
use humanoid_wbc::obs::{ACTION_DIM, ACTOR_DIM};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let layout = JointLayout::h1();
    let map = MirrorMap::h1();
    let mut action = vec![0.0; ACTION_DIM];
    action[layout.index_of("left_hip_roll").unwrap()] = 0.2;
    action[layout.index_of("left_knee").unwrap()] = 1.0;
    action[layout.index_of("torso").unwrap()] = 0.3;
    let mirrored = mirror_action(&action, &map)?;
    for (j, (a, m)) in layout.joints().iter().zip(action.iter().zip(&mirrored)) {
        if *a != 0.0 || *m != 0.0 {
            println!("{:<22} {a:+.2} -> {m:+.2}", j.name);
        }
    }
    assert_eq!(mirror_action(&mirrored, &map)?, action);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let w: Vec<Vec<f64>> = (0..ACTION_DIM)
        .map(|_| {
            (0..ACTOR_DIM)
                .map(|_| rng.random_range(-0.05..0.05))
                .collect()
        })
        .collect();
    let plain = |o: &[f64]| -> Vec<f64> {
        w.iter()
            .map(|r| r.iter().zip(o).map(|(a, b)| a * b).sum())
            .collect()
    };
    let symmetric = |o: &[f64]| -> Vec<f64> {
        let m = mirror_action(&plain(&mirror_observation(o, &map).unwrap()), &map).unwrap();
        plain(o)
            .iter()
            .zip(&m)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    };
    let batch: Vec<Vec<f64>> = (0..32)
        .map(|_| {
            (0..ACTOR_DIM)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect()
        })
        .collect();
    println!(
        "symmetry loss, plain policy       {:.4}",
        symmetry_loss(plain, &batch, &map)?
    );
    println!(
        "symmetry loss, symmetrized policy {:.4}",
        symmetry_loss(symmetric, &batch, &map)?
    );
    Ok(())
}
