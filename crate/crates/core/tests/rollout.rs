use humanoid_wbc::command::{Channel, CommandVector};
use humanoid_wbc::gait::{contact_probability, ContactModelParams, GaitPreset};
use humanoid_wbc::layout::JointLayout;
use humanoid_wbc::metrics::tracking_error;
use humanoid_wbc::reward::{apply_intervention_mask, compute_rewards, RewardContext, RewardTerm};
use humanoid_wbc::rollout::oracle::{GRAVITY, ROBOT_MASS};
use humanoid_wbc::rollout::{
    export_curves, run_oracle_rollout, run_toy_ppo, InterventionSettings, OracleConfig, RolloutLog,
    ToyConfig,
};

fn walking(vx: f64, steps: usize) -> OracleConfig {
    let mut cmd = CommandVector::defaults(GaitPreset::walking());
    cmd.set(Channel::Vx, vx);
    OracleConfig::new(cmd, steps)
}

#[test]
fn instant_tracking_is_perfect() {
    let mut cfg = walking(0.8, 1000);
    cfg.command.set(Channel::BodyHeight, -0.2);
    cfg.command.set(Channel::BodyPitch, 0.3);
    cfg.command.set(Channel::WaistYaw, 0.5);
    let log = run_oracle_rollout(&cfg).unwrap();
    let report = tracking_error(&log.steps(), &log.commands()).unwrap();
    for e in [
        report.e_vx,
        report.e_vy,
        report.e_omega,
        report.e_h,
        report.e_p,
        report.e_w,
    ] {
        assert!(e < 1e-6, "{report:?}");
    }
    assert!(report.e_f.unwrap() < 1e-9);
    assert!(report.e_l.unwrap() < 1e-9);

    let ctx = RewardContext::new(&JointLayout::h1());
    for r in &log.records {
        let b = compute_rewards(&r.step, &r.command, &ctx).unwrap();
        assert_eq!(
            b.get(RewardTerm::FootSwingTracking).unwrap().raw,
            0.0,
            "step {}",
            r.step.index
        );
    }
}

#[test]
fn stance_feet_are_pinned_and_carry_the_weight() {
    let log = run_oracle_rollout(&walking(1.0, 500)).unwrap();
    let params = ContactModelParams::default();
    for r in &log.records {
        let mut load = 0.0;
        for (foot, &pb) in r.step.feet.iter().zip(&r.step.phase_bar) {
            if contact_probability(pb, &params).unwrap() > 0.5 {
                assert_eq!(foot.velocity_xy, [0.0, 0.0], "step {}", r.step.index);
            }
            load += foot.contact_force[2];
        }
        assert!((load - ROBOT_MASS * GRAVITY).abs() < 1e-9 || load == 0.0);
    }
}

#[test]
fn standing_still_never_moves_the_feet() {
    let cfg = OracleConfig::new(CommandVector::defaults(GaitPreset::standing()), 1000);
    let log = run_oracle_rollout(&cfg).unwrap();
    let report = tracking_error(&log.steps(), &log.commands()).unwrap();
    assert_eq!(report.foot_displacement, 0.0);
}

#[test]
fn lagged_height_matches_closed_form() {
    let n = 1000;
    let delta = -0.2;
    let mut cfg = walking(0.0, n);
    cfg.command.set(Channel::BodyHeight, delta);
    cfg.lag = 0.1;
    let log = run_oracle_rollout(&cfg).unwrap();
    let report = tracking_error(&log.steps(), &log.commands()).unwrap();
    // recorded after each update: error at step k is |Δ|·a^(k+1)
    let a = (-cfg.dt / cfg.lag).exp();
    let expected = (0..n)
        .map(|k| delta.abs() * a.powi(k as i32 + 1))
        .sum::<f64>()
        / n as f64;
    assert!(
        (report.e_h - expected).abs() < 1e-6,
        "{} vs {expected}",
        report.e_h
    );
    assert!(report.e_h > 1e-4);
}

#[test]
fn base_travels_at_the_commanded_speed() {
    let log = run_oracle_rollout(&walking(0.5, 500)).unwrap();
    let (first, last) = (&log.records[0].step, &log.records[499].step);
    assert_eq!(first.base_lin_vel[0], 0.5);
    assert_eq!(last.base_lin_vel[0], 0.5);
    // feet advance with the base
    let x0 = first.feet[0].position[0];
    let x1 = last.feet[0].position[0];
    assert!((x1 - x0 - 0.5 * 499.0 * 0.02).abs() < 0.3, "{x0} -> {x1}");
}

#[test]
fn mask_tracks_the_indicator_exactly() {
    let mut cfg = walking(0.5, 100_000);
    cfg.seed = 21;
    cfg.intervention = Some(InterventionSettings {
        p_flip: 0.005,
        ..Default::default()
    });
    let log = run_oracle_rollout(&cfg).unwrap();
    let ctx = RewardContext::new(&JointLayout::h1());
    let (mut on, mut off) = (0, 0);
    for r in &log.records {
        let b = apply_intervention_mask(
            compute_rewards(&r.step, &r.command, &ctx).unwrap(),
            r.step.intervention,
        );
        for t in &b.terms {
            assert_eq!(
                t.masked,
                r.step.intervention && t.term == RewardTerm::UpperJointDeviation
            );
        }
        if r.step.intervention {
            on += 1;
        } else {
            off += 1;
        }
    }
    assert!(on > 10_000 && off > 10_000, "on {on} off {off}");
}

#[test]
fn arms_move_only_under_intervention() {
    let mut cfg = walking(0.3, 3000);
    cfg.seed = 4;
    cfg.intervention = Some(InterventionSettings {
        p_flip: 0.01,
        ..Default::default()
    });
    let layout = JointLayout::h1();
    let nominal = layout.nominal_pose();
    let log = run_oracle_rollout(&cfg).unwrap();
    let mut moved = false;
    for r in &log.records {
        for &i in &layout.upper_indices() {
            if !r.step.intervention {
                assert_eq!(r.step.joint_pos[i], nominal[i]);
            } else if r.step.joint_pos[i] != nominal[i] {
                moved = true;
            }
        }
    }
    assert!(moved);
}

#[test]
fn resampling_changes_commands_on_schedule() {
    let mut cfg = walking(0.0, 200);
    cfg.resample_every = Some(50);
    cfg.seed = 8;
    let log = run_oracle_rollout(&cfg).unwrap();
    let cmds = log.commands();
    for k in 1..200 {
        let same = cmds[k].task == cmds[k - 1].task;
        assert_eq!(same, k % 50 != 0, "step {k}");
    }
}

#[test]
fn logs_round_trip_and_are_reproducible() {
    let mut cfg = walking(0.7, 300);
    cfg.lag = 0.05;
    cfg.seed = 99;
    cfg.intervention = Some(InterventionSettings::default());
    let a = run_oracle_rollout(&cfg).unwrap();
    let b = run_oracle_rollout(&cfg).unwrap();
    let (mut ba, mut bb) = (Vec::new(), Vec::new());
    a.write_jsonl(&mut ba).unwrap();
    b.write_jsonl(&mut bb).unwrap();
    assert_eq!(ba, bb);
    let back = RolloutLog::read_jsonl(ba.as_slice()).unwrap();
    assert_eq!(back, a);
    back.validate().unwrap();

    let mut broken = a.clone();
    broken.records.swap(3, 4);
    assert!(broken.validate().is_err());
    assert!(RolloutLog::read_jsonl("not json\n".as_bytes()).is_err());
}

fn csv_column(path: &std::path::Path, name: &str) -> Vec<f64> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let idx = rdr
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == name)
        .unwrap();
    rdr.records()
        .map(|r| r.unwrap()[idx].parse().unwrap())
        .collect()
}

#[test]
fn exported_clocks_follow_the_gait() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = walking(0.5, 200);
    cfg.command.set(Channel::Frequency, 2.5);
    let files = export_curves(&run_oracle_rollout(&cfg).unwrap(), dir.path(), true).unwrap();
    assert!(files.iter().any(|p| p.ends_with("clocks.svg")));
    let curves = dir.path().join("curves.csv");
    let (l, r) = (csv_column(&curves, "clockL"), csv_column(&curves, "clockR"));
    // 2.5 Hz at 50 Hz: half a cycle is 10 steps
    for k in 0..l.len() - 10 {
        assert!((l[k] - r[k + 10]).abs() < 1e-9);
        assert!((l[k] + r[k]).abs() < 1e-9);
    }

    let jump = tempfile::tempdir().unwrap();
    let cfg = OracleConfig::new(CommandVector::defaults(GaitPreset::jumping()), 100);
    export_curves(&run_oracle_rollout(&cfg).unwrap(), jump.path(), false).unwrap();
    let curves = jump.path().join("curves.csv");
    assert_eq!(csv_column(&curves, "clockL"), csv_column(&curves, "clockR"));
    assert!(!jump.path().join("clocks.svg").exists());
}

#[test]
fn empty_log_exports_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let mut log = run_oracle_rollout(&walking(0.0, 1)).unwrap();
    log.records.clear();
    assert!(export_curves(&log, dir.path(), true).is_err());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn zero_epoch_training_reports_the_initial_policy() {
    let config = ToyConfig {
        epochs: 0,
        ..ToyConfig::default()
    };
    let report = run_toy_ppo(&config, 3).unwrap();
    assert!(report.epochs.is_empty());
    assert_eq!(report.final_eval, report.initial);
    assert_eq!(report.diverged_at, None);
    assert_eq!(run_toy_ppo(&config, 3).unwrap(), report);
}
