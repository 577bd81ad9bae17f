//! Samples commands from the initial ranges, then grows the speed grid
//! with always-successful updates until every bin is unlocked.

use humanoid_wbc::command::{
    sample_command, CommandRanges, LinAng, SpeedGrid, DEFAULT_TRACKING_THRESHOLDS,
};
use humanoid_wbc::gait::{GaitPreset, Leg};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for preset in [
        GaitPreset::walking(),
        GaitPreset::hopping(Leg::Right),
        GaitPreset::standing(),
    ] {
        let ranges = CommandRanges::for_gait(preset.kind);
        let c = sample_command(&ranges, preset, None, &mut rng)?;
        println!(
            "{preset:<14} vx {:+.2} vy {:+.2} w {:+.2} | f {:.2} l {:.2} h {:+.2} p {:.2} yaw {:+.2}",
            c.task.vx,
            c.task.vy,
            c.task.omega,
            c.behavior.frequency,
            c.behavior.swing_height,
            c.behavior.body_height,
            c.behavior.body_pitch,
            c.behavior.waist_yaw
        );
    }

    let ranges = CommandRanges::standard();
    let mut grid = SpeedGrid::with_default_bins(&ranges)?;
    let (rows, cols) = grid.shape();
    println!(
        "\nspeed grid {rows}x{cols}, {} bins unlocked at start",
        grid.unlocked_count()
    );
    let mut updates = 0;
    while !grid.is_fully_unlocked() {
        let bin = grid.sample_bin(&mut rng);
        grid = grid.update(bin, LinAng::new(1.9, 1.9), DEFAULT_TRACKING_THRESHOLDS)?;
        updates += 1;
        if updates % 50 == 0 {
            println!(
                "after {updates:>4} updates: {} unlocked",
                grid.unlocked_count()
            );
        }
    }
    println!("fully unlocked after {updates} updates");
    Ok(())
}
