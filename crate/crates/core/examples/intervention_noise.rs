//! Indicator run lengths and the interpolated upper-body noise signal for
//! one joint, and playback of a short recorded arm motion.

use humanoid_wbc::intervention::{
    advance_noise, dataset_interpolate, run_length_stats, DatasetTrajectory, InterventionState,
    NoiseBox,
};
use humanoid_wbc::layout::JointLayout;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let stats = run_length_stats(1_000_000, 0.005, &mut rng)?;
    println!(
        "{} runs, mean {:.1} steps, variance {:.0}",
        stats.runs, stats.mean, stats.variance
    );

    let layout = JointLayout::h1();
    let bounds = NoiseBox::from_layout(&layout, 0.1)?;
    let pose = bounds
        .lower
        .iter()
        .zip(&bounds.upper)
        .map(|(l, u)| 0.5 * (l + u))
        .collect();
    let mut state = InterventionState::new(pose);
    let joint = &layout.joints()[layout.upper_indices()[0]].name;
    println!("\n{joint} noise, every 10 steps:");
    for t in 0..300u64 {
        let (next, a) = advance_noise(&state, t, &bounds, &mut rng)?;
        if t % 10 == 0 {
            println!(
                "t {t:>3}  target {:+.3}  output {:+.3}",
                next.a_target[0], a[0]
            );
        }
        state = next;
    }

    let frames = vec![
        vec![0.0, 0.2],
        vec![0.5, 0.1],
        vec![0.8, -0.3],
        vec![0.2, 0.0],
    ];
    let motion = DatasetTrajectory::uniform(frames, 30.0)?;
    println!("\nrecorded motion at 30 fps, sampled at 50 Hz:");
    let (_, end) = motion.span();
    let mut t = 0.0;
    while t <= end {
        println!("t {t:.2}  q {:?}", dataset_interpolate(&motion, t)?);
        t += 0.02;
    }
    Ok(())
}
