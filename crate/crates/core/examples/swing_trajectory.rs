//! Swing-height target for a flat and a step-up profile, with the closed
//! form checked against the 6×6 boundary-value solve.

use humanoid_wbc::swing::{
    oracle_height, solve_quintic_oracle, target_derivatives, target_height, SwingProfile,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let flat = SwingProfile::flat(0.15);
    let step_up = SwingProfile {
        end_z: 0.1,
        ..SwingProfile::flat(0.25)
    };
    for (name, p) in [("flat", flat), ("step up 10 cm", step_up)] {
        let segments = solve_quintic_oracle(&p)?;
        println!("{name}: apex {} m, touchdown {} m", p.apex, p.end_z);
        println!(
            "{:>7} {:>9} {:>9} {:>10} {:>10}",
            "phibar", "height", "oracle", "velocity", "accel"
        );
        for k in 0..=20 {
            let x = 0.5 + 0.025 * k as f64;
            let (v, a) = target_derivatives(x, &p)?;
            println!(
                "{x:>7.3} {:>9.5} {:>9.5} {v:>10.4} {a:>10.3}",
                target_height(x, &p)?,
                oracle_height(&segments, x)
            );
        }
        println!();
    }
    Ok(())
}
