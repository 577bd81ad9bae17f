use humanoid_wbc::command::{CommandVector, COMMAND_DIM};
use humanoid_wbc::gait::GaitPreset;
use humanoid_wbc::layout::JointLayout;
use humanoid_wbc::mirror::{
    mirror_action, mirror_observation, symmetry_loss, MirrorMap, SignedPermutation,
};
use humanoid_wbc::obs::{ACTION_DIM, ACTOR_DIM, COMMAND_OFFSETS, HISTORY_LEN, PROPRIO_DIM};
use proptest::collection::vec;
use proptest::prelude::*;

fn linear_policy(o: &[f64]) -> Vec<f64> {
    (0..ACTION_DIM)
        .map(|j| {
            o.iter()
                .enumerate()
                .map(|(i, x)| x * (((i * 7 + j * 13) % 11) as f64 - 5.0) * 0.01)
                .sum()
        })
        .collect()
}

/// `g(o) + F_a g(F_o o)` is equivariant for any `g` because both maps are
/// involutions.
fn symmetrized(map: &MirrorMap) -> impl Fn(&[f64]) -> Vec<f64> + '_ {
    move |o| {
        let a = linear_policy(o);
        let b = mirror_action(&linear_policy(&mirror_observation(o, map).unwrap()), map).unwrap();
        a.iter().zip(&b).map(|(x, y)| x + y).collect()
    }
}

proptest! {
    #[test]
    fn observation_mirror_is_an_involution(o in vec(-10.0f64..10.0, ACTOR_DIM)) {
        let map = MirrorMap::h1();
        let once = mirror_observation(&o, &map).unwrap();
        prop_assert_eq!(mirror_observation(&once, &map).unwrap(), o);
    }

    #[test]
    fn action_mirror_is_an_involution(a in vec(-3.0f64..3.0, ACTION_DIM)) {
        let map = MirrorMap::h1();
        prop_assert_eq!(mirror_action(&mirror_action(&a, &map).unwrap(), &map).unwrap(), a);
    }

    #[test]
    fn mirror_preserves_norm(o in vec(-10.0f64..10.0, ACTOR_DIM)) {
        let map = MirrorMap::h1();
        let m = mirror_observation(&o, &map).unwrap();
        let n = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        prop_assert!((n(&o) - n(&m)).abs() <= 1e-9 * n(&o).max(1.0));
    }

    #[test]
    fn symmetrized_policy_has_zero_loss(batch in vec(vec(-1.0f64..1.0, ACTOR_DIM), 1..8)) {
        let map = MirrorMap::h1();
        prop_assert_eq!(symmetry_loss(symmetrized(&map), &batch, &map).unwrap(), 0.0);
    }
}

#[test]
fn unsymmetrized_policy_has_positive_loss() {
    let map = MirrorMap::h1();
    let batch: Vec<Vec<f64>> = (0..4)
        .map(|k| {
            (0..ACTOR_DIM)
                .map(|i| ((i + k) as f64 * 0.37).sin())
                .collect()
        })
        .collect();
    assert!(symmetry_loss(linear_policy, &batch, &map).unwrap() > 0.0);
}

#[test]
fn command_block_mirrors_lateral_channels() {
    let map = MirrorMap::h1();
    let mut cmd = CommandVector::defaults(GaitPreset::walking());
    cmd.task = humanoid_wbc::command::TaskCommand {
        vx: 0.7,
        vy: 0.2,
        omega: -0.3,
    };
    cmd.behavior.waist_yaw = 0.4;
    cmd.behavior.body_height = -0.1;
    cmd.behavior.clock = [0.25, -0.5];
    let mut o = vec![0.0; ACTOR_DIM];
    let base = HISTORY_LEN * PROPRIO_DIM;
    o[base..base + COMMAND_DIM].copy_from_slice(&cmd.to_array());
    o[ACTOR_DIM - 1] = 1.0;
    let m = mirror_observation(&o, &map).unwrap();
    let c = &m[base..base + COMMAND_DIM];
    assert_eq!(c[COMMAND_OFFSETS.vx], 0.7);
    assert_eq!(c[COMMAND_OFFSETS.vy], -0.2);
    assert_eq!(c[COMMAND_OFFSETS.omega], 0.3);
    assert_eq!(c[COMMAND_OFFSETS.waist_yaw], -0.4);
    assert_eq!(c[COMMAND_OFFSETS.body_height], -0.1);
    assert_eq!(c[COMMAND_OFFSETS.clock_left], -0.5);
    assert_eq!(c[COMMAND_OFFSETS.clock_right], 0.25);
    assert_eq!(m[ACTOR_DIM - 1], 1.0);
}

#[test]
fn action_mirror_swaps_legs_and_flips_roll() {
    let layout = JointLayout::h1();
    let map = MirrorMap::h1();
    let mut a = vec![0.0; ACTION_DIM];
    let l_roll = layout.index_of("left_hip_roll").unwrap();
    let l_knee = layout.index_of("left_knee").unwrap();
    let torso = layout.index_of("torso").unwrap();
    a[l_roll] = 0.1;
    a[l_knee] = 0.9;
    a[torso] = 0.3;
    let m = mirror_action(&a, &map).unwrap();
    assert_eq!(m[layout.index_of("right_hip_roll").unwrap()], -0.1);
    assert_eq!(m[layout.index_of("right_knee").unwrap()], 0.9);
    assert_eq!(m[torso], -0.3);
    assert_eq!(m[l_roll], 0.0);
}

#[test]
fn signed_permutation_rejects_bad_input() {
    assert!(SignedPermutation::new(vec![0, 0], vec![1.0, 1.0]).is_err());
    assert!(SignedPermutation::new(vec![1, 0], vec![1.0, 0.5]).is_err());
    assert!(SignedPermutation::identity(3).apply(&[1.0, 2.0]).is_err());
}
