mod common;

use common::{close, reward_fixtures};
use humanoid_wbc::layout::JointLayout;
use humanoid_wbc::reward::{
    apply_intervention_mask, compute_rewards, reward_contact_swing, reward_foot_swing,
    reward_posture, reward_velocity_tracking, ContactRewardForm, RewardContext, RewardGroup,
    RewardTerm,
};

fn ctx() -> RewardContext {
    RewardContext::new(&JointLayout::h1())
}

#[test]
fn fixtures_match_every_term() {
    let ctx = ctx();
    let fixtures = reward_fixtures();
    assert!(fixtures.len() >= 10);
    for fx in &fixtures {
        let b = apply_intervention_mask(
            compute_rewards(&fx.step, &fx.command, &ctx).unwrap(),
            fx.step.intervention,
        );
        // weighting scales the raw tolerance by |weight|
        let mut total_tol = 0.0;
        for t in &b.terms {
            let raw = fx.raw[t.term.name()];
            let weighted = fx.weighted[t.term.name()];
            let w = ctx.weights.get(t.term).abs();
            total_tol += 1e-12 * w * raw.abs().max(1.0);
            assert!(
                close(t.raw, raw, 1e-12),
                "{} {}: {} vs {}",
                fx.name,
                t.term,
                t.raw,
                raw
            );
            assert!(
                (t.weighted - weighted).abs() <= 1e-12 * w * raw.abs().max(1.0),
                "{} {}: {} vs {}",
                fx.name,
                t.term,
                t.weighted,
                weighted
            );
        }
        assert!(
            (b.total() - fx.total).abs() <= total_tol,
            "{} total {} vs {}",
            fx.name,
            b.total(),
            fx.total
        );
    }
}

#[test]
fn termination_costs_two_hundred() {
    let fx = reward_fixtures()
        .into_iter()
        .find(|f| f.name == "early_termination")
        .unwrap();
    let b = compute_rewards(&fx.step, &fx.command, &ctx()).unwrap();
    assert_eq!(b.get(RewardTerm::Termination).unwrap().weighted, -200.0);
}

#[test]
fn mask_only_zeroes_upper_deviation() {
    let fx = reward_fixtures()
        .into_iter()
        .find(|f| f.name == "masked_upper_deviation")
        .unwrap();
    let ctx = ctx();
    let plain = compute_rewards(&fx.step, &fx.command, &ctx).unwrap();
    let masked = apply_intervention_mask(plain.clone(), true);
    let dev = plain.get(RewardTerm::UpperJointDeviation).unwrap().weighted;
    assert!(dev < 0.0);
    assert!(close(masked.total() - plain.total(), -dev, 1e-12));
    for (a, b) in plain.terms.iter().zip(&masked.terms) {
        if a.term != RewardTerm::UpperJointDeviation {
            assert_eq!(a.contribution(), b.contribution());
        }
    }
    assert_eq!(apply_intervention_mask(masked.clone(), true), masked);
    assert_eq!(apply_intervention_mask(plain.clone(), false), plain);
}

#[test]
fn swing_foot_at_force_fifty_gives_e_minus_one() {
    let fx = reward_fixtures()
        .into_iter()
        .find(|f| f.name == "contact_swing_force_fifty")
        .unwrap();
    let ctx = ctx();
    let mut step = fx.step.clone();
    // isolate the swing foot
    step.feet[1] = Default::default();
    let probs = ctx.contact_probabilities(&step).unwrap();
    assert!(probs[0] < 1e-6);
    let w = reward_contact_swing(&step, probs, &ctx.contact_swing, &ctx.weights);
    let e1 = std::f64::consts::E - 1.0;
    assert!(close(w, -2.0 * (1.0 - probs[0]) * e1, 1e-12), "{w}");
    assert!((w + 2.0 * e1).abs() < 1e-5);
}

#[test]
fn negated_exponent_form_is_bounded() {
    let mut ctx = ctx();
    ctx.contact_swing.form = ContactRewardForm::NegatedExponent;
    for fx in reward_fixtures() {
        let b = compute_rewards(&fx.step, &fx.command, &ctx).unwrap();
        let raw = b.get(RewardTerm::ContactSwingTracking).unwrap().raw;
        // each of the two feet contributes at most one in magnitude
        assert!((-2.0..=0.0).contains(&raw), "{}: {raw}", fx.name);
    }
}

#[test]
fn per_group_helpers_agree_with_breakdown() {
    let ctx = ctx();
    for fx in reward_fixtures() {
        let b = compute_rewards(&fx.step, &fx.command, &ctx).unwrap();
        let (lin, ang) = reward_velocity_tracking(&fx.step, &fx.command, &ctx.weights);
        assert!(close(lin + ang, b.group_total(RewardGroup::Task), 1e-12));
        let probs = ctx.contact_probabilities(&fx.step).unwrap();
        let behavior = reward_posture(&fx.step, &fx.command, &ctx.weights)
            .iter()
            .sum::<f64>()
            + reward_foot_swing(&fx.step, &fx.command, probs, &ctx).unwrap()
            + reward_contact_swing(&fx.step, probs, &ctx.contact_swing, &ctx.weights);
        assert!(
            close(behavior, b.group_total(RewardGroup::Behavior), 1e-12),
            "{}",
            fx.name
        );
    }
}

#[test]
fn non_finite_step_is_rejected() {
    let mut fx = reward_fixtures().remove(0);
    fx.step.base_lin_vel[0] = f64::NAN;
    assert!(compute_rewards(&fx.step, &fx.command, &ctx())
        .unwrap_err()
        .is_numeric());
}
