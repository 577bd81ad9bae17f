use humanoid_wbc::intervention::{
    advance_noise, blend_with_policy, dataset_interpolate, interpolation_ratio, run_length_stats,
    step_indicator, DatasetTrajectory, InterventionState, NoiseBox, DEFAULT_T_INTERVAL,
};
use humanoid_wbc::layout::JointLayout;
use proptest::collection::vec;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn run_lengths_are_geometric() {
    let p = 0.005;
    let stats = run_length_stats(1_000_000, p, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
    let mean = (1.0 - p) / p;
    let var = (1.0 - p) / (p * p);
    assert!(
        (stats.mean - mean).abs() < 0.05 * mean,
        "mean {}",
        stats.mean
    );
    assert!(
        (stats.variance - var).abs() < 0.15 * var,
        "variance {}",
        stats.variance
    );
    assert_eq!(stats.histogram.values().sum::<u64>(), stats.runs);
}

#[test]
fn degenerate_flip_probabilities() {
    let always = run_length_stats(1000, 1.0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    assert_eq!(always.histogram.len(), 1);
    assert_eq!(always.histogram[&0], 1000);
    assert!(run_length_stats(1000, 0.0, &mut ChaCha8Rng::seed_from_u64(0)).is_err());

    let mut s = InterventionState::new(vec![0.0; 8]);
    s.p_flip = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        s = step_indicator(&s, &mut rng);
        assert!(!s.active);
    }
    s.p_flip = 1.5;
    assert!(s.validate().is_err());
}

#[test]
fn ratio_saturates_at_two_thirds_of_the_interval() {
    let t0 = 1_000;
    assert_eq!(interpolation_ratio(t0 + 60, t0, DEFAULT_T_INTERVAL), 1.0);
    assert!(interpolation_ratio(t0 + 59, t0, DEFAULT_T_INTERVAL) < 1.0);
    assert_eq!(interpolation_ratio(t0, t0, DEFAULT_T_INTERVAL), 0.0);
    assert_eq!(interpolation_ratio(t0 + 30, t0, DEFAULT_T_INTERVAL), 0.5);
    assert_eq!(interpolation_ratio(t0 + 89, t0, DEFAULT_T_INTERVAL), 1.0);
}

proptest! {
    #[test]
    fn noise_stays_inside_the_box_and_is_continuous(seed in 0u64..1000, margin in 0.0f64..0.4) {
        let layout = JointLayout::h1();
        let bounds = NoiseBox::from_layout(&layout, margin).unwrap();
        let pose: Vec<f64> = bounds.lower.iter().zip(&bounds.upper).map(|(l, u)| 0.5 * (l + u)).collect();
        let mut state = InterventionState::new(pose);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut prev: Option<Vec<f64>> = None;
        for t in 0..400u64 {
            let (next, a) = advance_noise(&state, t, &bounds, &mut rng).unwrap();
            prop_assert!(bounds.contains(&a));
            if let Some(p) = &prev {
                // the largest per-step move is 1.5/t_interval of the box width
                for ((x, y), (lo, hi)) in a.iter().zip(p).zip(bounds.lower.iter().zip(&bounds.upper)) {
                    prop_assert!((x - y).abs() <= 1.5 / DEFAULT_T_INTERVAL as f64 * (hi - lo) + 1e-12);
                }
            }
            prev = Some(a);
            state = next;
        }
    }

    #[test]
    fn blend_endpoints(p in vec(-2.0f64..2.0, 8), n in vec(-2.0f64..2.0, 8), alpha in 0.0f64..=1.0) {
        prop_assert_eq!(blend_with_policy(&p, &n, 0.0).unwrap(), p.clone());
        prop_assert_eq!(blend_with_policy(&p, &n, 1.0).unwrap(), n.clone());
        let mid = blend_with_policy(&p, &n, alpha).unwrap();
        for ((m, a), b) in mid.iter().zip(&p).zip(&n) {
            prop_assert!(*m >= a.min(*b) - 1e-12 && *m <= a.max(*b) + 1e-12);
        }
    }

    #[test]
    fn dataset_interpolation_is_piecewise_linear(f in 10.0f64..60.0, k in 0usize..9, frac in 0.0f64..1.0) {
        let frames: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let traj = DatasetTrajectory::uniform(frames, f).unwrap();
        let t = (k as f64 + frac) / f;
        let a = dataset_interpolate(&traj, t).unwrap();
        let expected0 = k as f64 + frac;
        let expected1 = (1.0 - frac) * (k * k) as f64 + frac * ((k + 1) * (k + 1)) as f64;
        prop_assert!((a[0] - expected0).abs() < 1e-9);
        prop_assert!((a[1] - expected1).abs() < 1e-9);
    }
}

#[test]
fn dataset_hits_frames_exactly_and_rejects_outside_times() {
    let frames = vec![vec![0.0], vec![2.0], vec![-1.0]];
    let traj = DatasetTrajectory::new(frames, vec![0.0, 0.1, 0.3], 30.0).unwrap();
    assert_eq!(dataset_interpolate(&traj, 0.1).unwrap(), vec![2.0]);
    assert_eq!(dataset_interpolate(&traj, 0.3).unwrap(), vec![-1.0]);
    assert!((dataset_interpolate(&traj, 0.2).unwrap()[0] - 0.5).abs() < 1e-12);
    assert!(dataset_interpolate(&traj, 0.31).is_err());
    assert!(dataset_interpolate(&traj, -0.01).is_err());
}

#[test]
fn dataset_reads_json_lines() {
    let text = "{\"t\":0.0,\"q\":[0,1]}\n{\"t\":0.5,\"q\":[1,3]}\n";
    let traj = DatasetTrajectory::read_jsonl(text.as_bytes(), 2.0).unwrap();
    assert_eq!(traj.len(), 2);
    assert_eq!(dataset_interpolate(&traj, 0.25).unwrap(), vec![0.5, 2.0]);
    assert!(DatasetTrajectory::read_jsonl("{\"t\":0.0}\n".as_bytes(), 2.0).is_err());
}
