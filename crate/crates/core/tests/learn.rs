mod common;

use common::random_batch;
use humanoid_wbc::learn::{
    clipped_surrogate, estimation_loss, gradient_check, ppo_policy_loss, ActorCritic,
    LossCoefficients, NetDims, NetSpec, SymmetryMaps,
};
use humanoid_wbc::mirror::MirrorMap;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn maps() -> SymmetryMaps {
    let m = MirrorMap::h1();
    SymmetryMaps {
        observation: m.observation_map().clone(),
        action: m.action_map().clone(),
    }
}

#[test]
fn micro_net_gradient_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let net = ActorCritic::new(&NetSpec::micro(), NetDims::humanoid(), -0.5, &mut rng).unwrap();
    let batch = random_batch(&net, 4, &mut rng);
    let report = gradient_check(
        &net,
        &batch,
        &LossCoefficients::default(),
        Some(&maps()),
        1e-5,
    )
    .unwrap();
    for (name, err) in &report.tensors {
        assert!(*err < 1e-4, "{name}: {err}");
    }
    assert_eq!(report.tensors.len(), 2 * (3 + 3 + 4 + 3) + 1);
}

#[test]
fn symmetry_term_zero_without_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let net = ActorCritic::new(&NetSpec::micro(), NetDims::humanoid(), -0.5, &mut rng).unwrap();
    let batch = random_batch(&net, 3, &mut rng);
    let c = LossCoefficients::default();
    let without = net.loss_and_grad(&batch, &c, None).unwrap();
    assert_eq!(without.terms.sym, 0.0);
    let with = net.loss_and_grad(&batch, &c, Some(&maps())).unwrap();
    assert!(with.terms.sym > 0.0);
    assert!((with.total - without.total - 0.5 * with.terms.sym).abs() < 1e-12);
}

#[test]
fn estimation_loss_decreases_under_descent() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let dims = NetDims {
        history: 2,
        proprio: 3,
        command: 1,
        critic: 2,
        action: 1,
        estimate: 2,
    };
    let mut net = ActorCritic::new(&NetSpec::micro(), dims, -0.5, &mut rng).unwrap();
    let mut batch = random_batch(&net, 16, &mut rng);
    for (obs, t) in batch.actor_obs.iter().zip(batch.est_targets.iter_mut()) {
        *t = vec![0.5 * obs[0] - 0.3 * obs[4], 0.2 * obs[5] + 0.1];
    }
    let coeffs = LossCoefficients {
        lambda_policy: 0.0,
        beta: 0.0,
        ..LossCoefficients::default()
    };
    let mut prev = f64::INFINITY;
    for _ in 0..100 {
        let eval = net.loss_and_grad(&batch, &coeffs, None).unwrap();
        assert!(eval.terms.est < prev, "{} !< {prev}", eval.terms.est);
        prev = eval.terms.est;
        let p: Vec<f64> = net
            .params()
            .iter()
            .zip(&eval.grad)
            .map(|(p, g)| p - 0.02 * g)
            .collect();
        net.set_params(&p).unwrap();
    }
    let estimates: Vec<Vec<f64>> = batch
        .actor_obs
        .iter()
        .map(|o| net.estimate(o).unwrap())
        .collect();
    assert!((estimation_loss(&estimates, &batch.est_targets).unwrap() - prev).abs() < 1e-2);
}

proptest! {
    #[test]
    fn ppo_loss_matches_brute_force(
        pairs in prop::collection::vec((0.0f64..3.0, -5.0f64..5.0), 1..=64),
        eps in 0.05f64..0.5,
    ) {
        let (r, a): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
        let mut sum = 0.0;
        for (&ri, &ai) in r.iter().zip(&a) {
            let lo = 1.0 - eps;
            let hi = 1.0 + eps;
            let clipped = if ri < lo { lo } else if ri > hi { hi } else { ri };
            let u = ri * ai;
            let c = clipped * ai;
            sum += if u < c { u } else { c };
            prop_assert_eq!(clipped_surrogate(ri, ai, eps), if u < c { u } else { c });
        }
        let expected = -sum / r.len() as f64;
        let got = ppo_policy_loss(&r, &a, eps).unwrap();
        prop_assert!((got - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
    }
}
