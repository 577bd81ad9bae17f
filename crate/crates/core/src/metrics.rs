//! Episodic command-tracking error and foot displacement.

use serde::{Deserialize, Serialize};

use crate::command::CommandVector;
use crate::error::{Error, Result};
use crate::step::RobotStep;
use crate::swing::{target_height, SwingProfile, SWING_START};

/// Mean L1 tracking error per command channel, and total foot travel.
///
/// Frequency and swing-height errors are aggregated over completed gait
/// cycles and are `None` when the episode contains none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackingErrorReport {
    pub steps: usize,
    pub cycles: usize,
    pub e_vx: f64,
    pub e_vy: f64,
    pub e_omega: f64,
    pub e_h: f64,
    pub e_p: f64,
    pub e_w: f64,
    pub e_f: Option<f64>,
    pub e_l: Option<f64>,
    /// Summed horizontal displacement of both feet (m).
    pub foot_displacement: f64,
}

/// Times at which a leg's raw phase wrapped past zero, linearly
/// interpolated between the bracketing steps.
fn wrap_times(steps: &[RobotStep], leg: usize) -> Vec<(usize, f64)> {
    steps
        .windows(2)
        .enumerate()
        .filter_map(|(k, w)| {
            let (p0, p1) = (w[0].phase[leg], w[1].phase[leg]);
            if p1 + 0.5 < p0 {
                let frac = (1.0 - p0) / (1.0 + p1 - p0);
                Some((k + 1, w[0].t + frac * (w[1].t - w[0].t)))
            } else {
                None
            }
        })
        .collect()
}

fn swing_error(step: &RobotStep, cmd: &CommandVector) -> Result<Option<(f64, usize)>> {
    let profile = SwingProfile {
        duty_cycle: cmd.behavior.duty_cycle,
        ..SwingProfile::flat(cmd.behavior.swing_height)
    };
    let mut sum = 0.0;
    let mut n = 0;
    for (foot, &phi_bar) in step.feet.iter().zip(&step.phase_bar) {
        if phi_bar >= SWING_START {
            sum += (target_height(phi_bar, &profile)? - foot.swing_height).abs();
            n += 1;
        }
    }
    Ok((n > 0).then_some((sum, n)))
}

/// `cmds` holds either one command for the whole episode or one per step.
pub fn tracking_error(steps: &[RobotStep], cmds: &[CommandVector]) -> Result<TrackingErrorReport> {
    if steps.is_empty() {
        return Err(Error::Empty("rollout log"));
    }
    if cmds.len() != 1 && cmds.len() != steps.len() {
        return Err(Error::DimensionMismatch {
            what: "commands per step",
            expected: steps.len(),
            got: cmds.len(),
        });
    }
    let cmd_at = |k: usize| if cmds.len() == 1 { &cmds[0] } else { &cmds[k] };

    let n = steps.len() as f64;
    let mut sums = [0.0; 6];
    for (k, s) in steps.iter().enumerate() {
        let c = cmd_at(k);
        let errs = [
            c.task.vx - s.base_lin_vel[0],
            c.task.vy - s.base_lin_vel[1],
            c.task.omega - s.base_ang_vel[2],
            c.behavior.body_height - s.body_height,
            c.behavior.body_pitch - s.body_pitch,
            c.behavior.waist_yaw - s.waist_yaw,
        ];
        for (acc, e) in sums.iter_mut().zip(errs) {
            *acc += e.abs();
        }
    }
    let [e_vx, e_vy, e_omega, e_h, e_p, e_w] = sums.map(|x| x / n);

    let mut wraps = wrap_times(steps, 0);
    if wraps.len() < 2 {
        wraps = wrap_times(steps, 1);
    }
    let mut f_errs = Vec::new();
    let mut l_errs = Vec::new();
    for w in wraps.windows(2) {
        let ((k0, t0), (k1, t1)) = (w[0], w[1]);
        let f_cmd = cmd_at(k0).behavior.frequency;
        f_errs.push((f_cmd - 1.0 / (t1 - t0)).abs());
        let (mut sum, mut count) = (0.0, 0);
        for (k, step) in steps.iter().enumerate().take(k1).skip(k0) {
            if let Some((s, c)) = swing_error(step, cmd_at(k))? {
                sum += s;
                count += c;
            }
        }
        if count > 0 {
            l_errs.push(sum / count as f64);
        }
    }
    let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);

    let foot_displacement = steps
        .windows(2)
        .map(|w| {
            (0..2)
                .map(|i| {
                    let (a, b) = (w[0].feet[i].position, w[1].feet[i].position);
                    (b[0] - a[0]).hypot(b[1] - a[1])
                })
                .sum::<f64>()
        })
        .sum();

    Ok(TrackingErrorReport {
        steps: steps.len(),
        cycles: f_errs.len(),
        e_vx,
        e_vy,
        e_omega,
        e_h,
        e_p,
        e_w,
        e_f: mean(&f_errs),
        e_l: mean(&l_errs),
        foot_displacement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gait::GaitPreset;
    use crate::layout::JointLayout;

    fn rest_log(n: usize) -> Vec<RobotStep> {
        (0..n)
            .map(|k| {
                let mut s = RobotStep::at_rest(JointLayout::h1().nominal_pose());
                s.index = k as u64;
                s.t = k as f64 * 0.02;
                s
            })
            .collect()
    }

    #[test]
    fn empty_log_rejected() {
        let cmd = CommandVector::defaults(GaitPreset::standing());
        assert!(matches!(tracking_error(&[], &[cmd]), Err(Error::Empty(_))));
    }

    #[test]
    fn constant_height_offset() {
        let mut log = rest_log(50);
        for s in &mut log {
            s.body_height = -0.05;
        }
        let cmd = CommandVector::defaults(GaitPreset::standing());
        let r = tracking_error(&log, &[cmd]).unwrap();
        assert!((r.e_h - 0.05).abs() < 1e-15);
        assert_eq!(r.e_vx, 0.0);
        assert_eq!(r.foot_displacement, 0.0);
        assert_eq!(r.e_f, None);
    }

    #[test]
    fn frequency_from_wraps() {
        // 2 Hz clock sampled at 50 Hz with an offset so wraps fall between steps.
        let mut log = rest_log(200);
        for s in &mut log {
            let phi = (0.013 + 2.0 * s.t).fract();
            s.phase = [phi, (phi + 0.5).fract()];
            s.phase_bar = s.phase;
        }
        let cmd = CommandVector::defaults(GaitPreset::walking());
        let r = tracking_error(&log, &[cmd]).unwrap();
        assert_eq!(r.cycles, 6);
        assert!(r.e_f.unwrap() < 1e-9);
    }
}
