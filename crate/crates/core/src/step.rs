//! The per-step robot snapshot shared by logs, rewards, metrics and
//! observation assembly.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::layout::NUM_JOINTS;

/// Number of link collision flags in the privileged observation.
pub const NUM_COLLISION_FLAGS: usize = 11;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FootState {
    /// World-frame position (m).
    pub position: [f64; 3],
    /// Position in the heading-aligned base frame (m).
    pub position_base: [f64; 3],
    /// Horizontal velocity (m/s).
    pub velocity_xy: [f64; 2],
    /// Height above the local ground (m).
    pub swing_height: f64,
    /// Contact force (N); the third component is the normal force.
    pub contact_force: [f64; 3],
}

/// One control-step snapshot.
///
/// Posture fields (`body_height`, `body_pitch`, `waist_yaw`) live in the
/// same units and frame as the matching commands, so `body_height` is the
/// offset from the nominal standing height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotStep {
    pub index: u64,
    pub t: f64,
    /// Base linear velocity in the base frame.
    pub base_lin_vel: [f64; 3],
    /// Base angular velocity in the base frame.
    pub base_ang_vel: [f64; 3],
    /// Base roll, pitch, yaw.
    pub base_rpy: [f64; 3],
    pub body_height: f64,
    pub body_pitch: f64,
    pub waist_yaw: f64,
    pub joint_pos: Vec<f64>,
    pub joint_vel: Vec<f64>,
    pub joint_acc: Vec<f64>,
    pub joint_torque: Vec<f64>,
    pub feet: [FootState; 2],
    /// `a_t`.
    pub action: Vec<f64>,
    /// `a_{t-1}`.
    pub prev_action: Vec<f64>,
    /// `a_{t-2}`.
    pub prev_prev_action: Vec<f64>,
    /// Raw phases `φ₁, φ₂`.
    pub phase: [f64; 2],
    /// Homogenized phases `φ̄₁, φ̄₂`.
    pub phase_bar: [f64; 2],
    pub intervention: bool,
    pub terminated: bool,
    #[serde(default = "default_friction")]
    pub friction: f64,
    #[serde(default)]
    pub collisions: [bool; NUM_COLLISION_FLAGS],
}

fn default_friction() -> f64 {
    1.0
}

impl RobotStep {
    /// A robot standing still at the given joint pose.
    pub fn at_rest(joint_pos: Vec<f64>) -> Self {
        let n = joint_pos.len();
        Self {
            index: 0,
            t: 0.0,
            base_lin_vel: [0.0; 3],
            base_ang_vel: [0.0; 3],
            base_rpy: [0.0; 3],
            body_height: 0.0,
            body_pitch: 0.0,
            waist_yaw: 0.0,
            action: joint_pos.clone(),
            prev_action: joint_pos.clone(),
            prev_prev_action: joint_pos.clone(),
            joint_pos,
            joint_vel: vec![0.0; n],
            joint_acc: vec![0.0; n],
            joint_torque: vec![0.0; n],
            feet: [FootState::default(); 2],
            phase: [0.25, 0.25],
            phase_bar: [0.25, 0.25],
            intervention: false,
            terminated: false,
            friction: 1.0,
            collisions: [false; NUM_COLLISION_FLAGS],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("joint_pos", &self.joint_pos),
            ("joint_vel", &self.joint_vel),
            ("joint_acc", &self.joint_acc),
            ("joint_torque", &self.joint_torque),
            ("action", &self.action),
            ("prev_action", &self.prev_action),
            ("prev_prev_action", &self.prev_prev_action),
        ] {
            check_dim(what, NUM_JOINTS, v.len())?;
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(what));
            }
        }
        let scalars = self
            .base_lin_vel
            .iter()
            .chain(&self.base_ang_vel)
            .chain(&self.base_rpy)
            .chain([
                &self.body_height,
                &self.body_pitch,
                &self.waist_yaw,
                &self.friction,
            ])
            .chain(&self.phase_bar);
        if scalars.into_iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("robot step"));
        }
        for f in &self.feet {
            let vals = f
                .position
                .iter()
                .chain(&f.position_base)
                .chain(&f.velocity_xy)
                .chain(&f.contact_force)
                .chain([&f.swing_height]);
            if vals.into_iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("foot state"));
            }
            if f.contact_force[2] < 0.0 {
                return Err(Error::param(
                    "contact_force",
                    "normal component must be >= 0",
                ));
            }
        }
        Ok(())
    }
}
