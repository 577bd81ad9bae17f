//! Prints one cycle of phases, clocks and contact probabilities for each
//! gait preset.

use humanoid_wbc::gait::{clock_trace, ContactModelParams, GaitPreset, Leg};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ContactModelParams::default();
    for preset in [
        GaitPreset::walking(),
        GaitPreset::jumping(),
        GaitPreset::standing(),
        GaitPreset::hopping(Leg::Left),
    ] {
        println!("{preset}");
        println!(
            "{:>6} {:>12} {:>12} {:>14} {:>14}",
            "t", "phi_bar", "clock", "contact L", "contact R"
        );
        for s in clock_trace(preset, 2.0, 0.02, &params, 1.0)?
            .iter()
            .step_by(5)
        {
            println!(
                "{:>6.2} {:>5.2} {:>5.2}  {:>5.2} {:>5.2}  {:>14.4} {:>14.4}",
                s.t, s.phi_bar[0], s.phi_bar[1], s.clock[0], s.clock[1], s.contact[0], s.contact[1]
            );
        }
        println!();
    }
    Ok(())
}
