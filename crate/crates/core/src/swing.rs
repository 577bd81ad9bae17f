//! Swing-foot height targets over the homogenized phase.
//!
//! The swing half of the cycle (`φ̄ ∈ [0.5, 1]`) is split into a rise
//! `[0.5, 0.75]` from the lift-off height to the commanded apex and a fall
//! `[0.75, 1]` back to the touchdown height. Both pieces are quintics with
//! zero velocity and acceleration at their ends, which reduces to the
//! smoothstep `s(u) = 10u³ − 15u⁴ + 6u⁵`. The stance half is flat at zero.
//!
//! [`solve_quintic_oracle`] recovers the same pieces from the raw 6×6
//! boundary-condition systems and is kept as an independent check on the
//! closed form.

use nalgebra::{Matrix6, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SWING_START: f64 = 0.5;
pub const SWING_APEX: f64 = 0.75;
pub const SWING_END: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwingProfile {
    /// Commanded apex height (m).
    pub apex: f64,
    pub start_z: f64,
    pub end_z: f64,
    pub duty_cycle: f64,
}

impl SwingProfile {
    /// Flat-ground profile: lift off and land at zero height.
    pub fn flat(apex: f64) -> Self {
        Self {
            apex,
            start_z: 0.0,
            end_z: 0.0,
            duty_cycle: crate::gait::DEFAULT_DUTY_CYCLE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.apex.is_finite() && self.start_z.is_finite() && self.end_z.is_finite()) {
            return Err(Error::NonFinite("swing profile"));
        }
        if self.apex < 0.0 {
            return Err(Error::param("apex", format!("{} must be >= 0", self.apex)));
        }
        Ok(())
    }
}

fn smoothstep(u: f64) -> (f64, f64, f64) {
    let u2 = u * u;
    let u3 = u2 * u;
    (
        u3 * (10.0 + u * (-15.0 + 6.0 * u)),
        30.0 * u2 * (1.0 - u) * (1.0 - u),
        60.0 * u * (1.0 + u * (-3.0 + 2.0 * u)),
    )
}

/// Position, velocity and acceleration (per unit of `φ̄`) of the target.
fn evaluate(phi_bar: f64, p: &SwingProfile) -> (f64, f64, f64) {
    let (from, to, start, width) = if phi_bar < SWING_START {
        return (0.0, 0.0, 0.0);
    } else if phi_bar <= SWING_APEX {
        (p.start_z, p.apex, SWING_START, SWING_APEX - SWING_START)
    } else {
        (p.apex, p.end_z, SWING_APEX, SWING_END - SWING_APEX)
    };
    let u = (phi_bar - start) / width;
    let (s, ds, dds) = smoothstep(u);
    let span = to - from;
    (
        from + span * s,
        span * ds / width,
        span * dds / (width * width),
    )
}

fn check_phase(phi_bar: f64) -> Result<()> {
    if (0.0..=1.0).contains(&phi_bar) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "phi_bar",
            value: phi_bar,
            lo: 0.0,
            hi: 1.0,
        })
    }
}

/// Target swing height at homogenized phase `phi_bar`.
pub fn target_height(phi_bar: f64, profile: &SwingProfile) -> Result<f64> {
    check_phase(phi_bar)?;
    Ok(evaluate(phi_bar, profile).0)
}

/// First and second derivative of [`target_height`] with respect to `φ̄`.
pub fn target_derivatives(phi_bar: f64, profile: &SwingProfile) -> Result<(f64, f64)> {
    check_phase(phi_bar)?;
    let (_, v, a) = evaluate(phi_bar, profile);
    Ok((v, a))
}

/// A quintic `a5 x⁵ + … + a0` over an absolute `φ̄` interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuinticSegment {
    /// Coefficients ordered `[a5, a4, a3, a2, a1, a0]`.
    pub coefficients: [f64; 6],
    pub domain: (f64, f64),
}

impl QuinticSegment {
    /// Solves the rest-to-rest boundary system: position `z0`/`z1` at the
    /// interval ends with zero velocity and acceleration at both.
    pub fn fit(start: f64, end: f64, z0: f64, z1: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) || end <= start {
            return Err(Error::Singular(format!(
                "degenerate swing interval [{start}, {end}]"
            )));
        }
        let pos = |x: f64| [x.powi(5), x.powi(4), x.powi(3), x * x, x, 1.0];
        let vel = |x: f64| {
            [
                5.0 * x.powi(4),
                4.0 * x.powi(3),
                3.0 * x * x,
                2.0 * x,
                1.0,
                0.0,
            ]
        };
        let acc = |x: f64| [20.0 * x.powi(3), 12.0 * x * x, 6.0 * x, 2.0, 0.0, 0.0];
        let rows = [
            pos(start),
            pos(end),
            vel(start),
            vel(end),
            acc(start),
            acc(end),
        ];
        let m = Matrix6::from_fn(|r, c| rows[r][c]);
        let rhs = Vector6::new(z0, z1, 0.0, 0.0, 0.0, 0.0);
        let sol = m
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Singular(format!("boundary system on [{start}, {end}]")))?;
        Ok(Self {
            coefficients: [sol[0], sol[1], sol[2], sol[3], sol[4], sol[5]],
            domain: (start, end),
        })
    }

    pub fn position(&self, x: f64) -> f64 {
        self.coefficients.iter().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn velocity(&self, x: f64) -> f64 {
        let [a5, a4, a3, a2, a1, _] = self.coefficients;
        (((5.0 * a5 * x + 4.0 * a4) * x + 3.0 * a3) * x + 2.0 * a2) * x + a1
    }

    pub fn acceleration(&self, x: f64) -> f64 {
        let [a5, a4, a3, a2, _, _] = self.coefficients;
        ((20.0 * a5 * x + 12.0 * a4) * x + 6.0 * a3) * x + 2.0 * a2
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.domain.0 && x <= self.domain.1
    }
}

/// Rise and fall segments obtained by direct dense solves.
pub fn solve_quintic_oracle(profile: &SwingProfile) -> Result<(QuinticSegment, QuinticSegment)> {
    profile.validate()?;
    let rise = QuinticSegment::fit(SWING_START, SWING_APEX, profile.start_z, profile.apex)?;
    let fall = QuinticSegment::fit(SWING_APEX, SWING_END, profile.apex, profile.end_z)?;
    Ok((rise, fall))
}

/// Evaluates the solved segments with the same stance convention as
/// [`target_height`].
pub fn oracle_height(segments: &(QuinticSegment, QuinticSegment), phi_bar: f64) -> f64 {
    if phi_bar < SWING_START {
        0.0
    } else if phi_bar <= SWING_APEX {
        segments.0.position(phi_bar)
    } else {
        segments.1.position(phi_bar)
    }
}

/// Horizontal foot offset from the hip during swing.
///
/// This is a linear Raibert-style heuristic rather than a planned
/// trajectory: the stride covers the distance the base travels during one
/// stance (`v · φ_stance / f`) and the foot sweeps from `-stride/2` at
/// lift-off to `+stride/2` at touchdown. Stance returns `None` because the
/// foot is pinned to the ground.
pub fn stride_offset(
    phi_bar: f64,
    velocity: [f64; 2],
    frequency: f64,
    duty_cycle: f64,
) -> Option<[f64; 2]> {
    if phi_bar < SWING_START {
        return None;
    }
    let stance_time = duty_cycle / frequency;
    let s = ((phi_bar - SWING_START) / (SWING_END - SWING_START)).clamp(0.0, 1.0);
    Some(velocity.map(|v| v * stance_time * (s - 0.5)))
}
