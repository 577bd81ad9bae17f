//! Observation assembly for the actor, critic and state estimator.
//!
//! Proprioceptive frame (63): base angular velocity (3), projected gravity
//! (3), joint positions (19), joint velocities (19), previous action (19).
//!
//! Privileged block (24): base linear velocity (3), body-height error (1),
//! foot clearance (2), ground friction (1), foot contact forces (2 × 3) and
//! link collision flags (11: trunk, hips, thighs, shanks, shoulders, arms).
//!
//! Terrain block (221): a 13 × 17 height grid centred on the base. The
//! assembler fills it with flat ground unless samples are supplied.

use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use crate::command::{CommandVector, COMMAND_DIM};
use crate::error::{check_dim, Error, Result};
use crate::layout::NUM_JOINTS;
use crate::step::{RobotStep, NUM_COLLISION_FLAGS};

pub const PROPRIO_DIM: usize = 63;
pub const PRIVILEGED_DIM: usize = 24;
pub const TERRAIN_ROWS: usize = 13;
pub const TERRAIN_COLS: usize = 17;
pub const TERRAIN_DIM: usize = TERRAIN_ROWS * TERRAIN_COLS;
pub const HISTORY_LEN: usize = 5;
pub const ACTION_DIM: usize = NUM_JOINTS;
/// Estimated key state: linear velocity (3), foot clearance (2), body height (1).
pub const ESTIMATE_DIM: usize = 6;
/// Commands followed by the intervention indicator.
pub const COMMAND_DIM_WITH_INDICATOR: usize = COMMAND_DIM + 1;
/// Actor input: history, commands, indicator.
pub const ACTOR_DIM: usize = HISTORY_LEN * PROPRIO_DIM + COMMAND_DIM_WITH_INDICATOR;
/// Critic input: proprioception, privileged, terrain, commands, indicator.
pub const CRITIC_DIM: usize = PROPRIO_DIM + PRIVILEGED_DIM + TERRAIN_DIM + COMMAND_DIM + 1;

/// Positions of the channels inside the 12-wide command block.
pub struct CommandOffsets {
    pub vx: usize,
    pub vy: usize,
    pub omega: usize,
    pub frequency: usize,
    pub swing_height: usize,
    pub body_height: usize,
    pub body_pitch: usize,
    pub waist_yaw: usize,
    pub phase_offset: usize,
    pub duty_cycle: usize,
    pub clock_left: usize,
    pub clock_right: usize,
}

pub const COMMAND_OFFSETS: CommandOffsets = CommandOffsets {
    vx: 0,
    vy: 1,
    omega: 2,
    frequency: 3,
    swing_height: 4,
    body_height: 5,
    body_pitch: 6,
    waist_yaw: 7,
    phase_offset: 8,
    duty_cycle: 9,
    clock_left: 10,
    clock_right: 11,
};

/// Sizes of the actor observation for a given joint count and history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActorLayout {
    pub joints: usize,
    pub history: usize,
}

impl ActorLayout {
    pub fn new(joints: usize, history: usize) -> Result<Self> {
        if joints == 0 || history == 0 {
            return Err(Error::param(
                "actor layout",
                "joints and history must be >= 1",
            ));
        }
        Ok(Self { joints, history })
    }

    pub fn proprio_dim(&self) -> usize {
        6 + 3 * self.joints
    }

    pub fn total(&self) -> usize {
        self.history * self.proprio_dim() + COMMAND_DIM + 1
    }
}

/// Rolling window of proprioceptive frames, oldest first, zero-padded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProprioHistory {
    frames: VecDeque<Vec<f64>>,
}

impl Default for ProprioHistory {
    fn default() -> Self {
        Self::zeros()
    }
}

impl ProprioHistory {
    /// Episode-start history: `HISTORY_LEN` zero frames.
    pub fn zeros() -> Self {
        Self {
            frames: std::iter::repeat_n(vec![0.0; PROPRIO_DIM], HISTORY_LEN).collect(),
        }
    }

    /// Copy with `frame` appended and the oldest frame dropped.
    pub fn pushed(&self, frame: Vec<f64>) -> Result<Self> {
        check_dim("proprioceptive frame", PROPRIO_DIM, frame.len())?;
        let mut frames = self.frames.clone();
        frames.pop_front();
        frames.push_back(frame);
        Ok(Self { frames })
    }

    pub fn frames(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.frames.iter()
    }

    pub fn newest(&self) -> &[f64] {
        self.frames.back().expect("history is never empty")
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.frames.iter().flatten().copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationFrame {
    pub proprio: Vec<f64>,
    pub privileged: Vec<f64>,
    pub terrain: Vec<f64>,
    pub history: ProprioHistory,
    pub commands: [f64; COMMAND_DIM],
    pub indicator: bool,
    /// Estimator targets: linear velocity, foot clearance, body height.
    pub key_state: [f64; ESTIMATE_DIM],
}

impl ObservationFrame {
    /// History, commands and indicator, in that order.
    pub fn actor_input(&self) -> Vec<f64> {
        let mut v = self.history.flatten();
        v.extend_from_slice(&self.commands);
        v.push(indicator_value(self.indicator));
        v
    }

    pub fn critic_input(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(CRITIC_DIM);
        v.extend_from_slice(&self.proprio);
        v.extend_from_slice(&self.privileged);
        v.extend_from_slice(&self.terrain);
        v.extend_from_slice(&self.commands);
        v.push(indicator_value(self.indicator));
        v
    }

    pub fn with_terrain(mut self, samples: Vec<f64>) -> Result<Self> {
        check_dim("terrain samples", TERRAIN_DIM, samples.len())?;
        self.terrain = samples;
        Ok(self)
    }

    /// Asserts every block has its declared width.
    pub fn check_dims(&self) -> Result<()> {
        check_dim(
            "proprioceptive observation",
            PROPRIO_DIM,
            self.proprio.len(),
        )?;
        check_dim(
            "privileged observation",
            PRIVILEGED_DIM,
            self.privileged.len(),
        )?;
        check_dim("terrain observation", TERRAIN_DIM, self.terrain.len())?;
        check_dim("history length", HISTORY_LEN, self.history.frames.len())?;
        for f in &self.history.frames {
            check_dim("history frame", PROPRIO_DIM, f.len())?;
        }
        check_dim("actor observation", ACTOR_DIM, self.actor_input().len())?;
        check_dim("critic observation", CRITIC_DIM, self.critic_input().len())?;
        Ok(())
    }
}

fn indicator_value(flag: bool) -> f64 {
    if flag {
        1.0
    } else {
        0.0
    }
}

/// Unit gravity `(0, 0, -1)` expressed in the base frame for a ZYX
/// roll/pitch/yaw orientation.
pub fn projected_gravity([roll, pitch, _yaw]: [f64; 3]) -> [f64; 3] {
    [
        pitch.sin(),
        -roll.sin() * pitch.cos(),
        -roll.cos() * pitch.cos(),
    ]
}

pub fn proprio_frame(step: &RobotStep) -> Result<Vec<f64>> {
    step.validate()?;
    let mut v = Vec::with_capacity(PROPRIO_DIM);
    v.extend_from_slice(&step.base_ang_vel);
    v.extend_from_slice(&projected_gravity(step.base_rpy));
    v.extend_from_slice(&step.joint_pos);
    v.extend_from_slice(&step.joint_vel);
    v.extend_from_slice(&step.prev_action);
    check_dim("proprioceptive observation", PROPRIO_DIM, v.len())?;
    Ok(v)
}

pub fn privileged_block(step: &RobotStep, cmd: &CommandVector) -> Vec<f64> {
    let mut v = Vec::with_capacity(PRIVILEGED_DIM);
    v.extend_from_slice(&step.base_lin_vel);
    v.push(step.body_height - cmd.behavior.body_height);
    v.extend(step.feet.iter().map(|f| f.swing_height));
    v.push(step.friction);
    for f in &step.feet {
        v.extend_from_slice(&f.contact_force);
    }
    v.extend(step.collisions.iter().map(|&c| indicator_value(c)));
    debug_assert_eq!(v.len(), 3 + 1 + 2 + 1 + 6 + NUM_COLLISION_FLAGS);
    v
}

pub fn key_state(step: &RobotStep) -> [f64; ESTIMATE_DIM] {
    let v = step.base_lin_vel;
    [
        v[0],
        v[1],
        v[2],
        step.feet[0].swing_height,
        step.feet[1].swing_height,
        step.body_height,
    ]
}

/// Builds the observation for `step`. The returned frame's history already
/// contains the current proprioceptive frame as its newest entry; feed it
/// back in on the next step.
pub fn assemble_observation(
    step: &RobotStep,
    cmd: &CommandVector,
    history: &ProprioHistory,
    indicator: bool,
) -> Result<ObservationFrame> {
    let proprio = proprio_frame(step)?;
    let frame = ObservationFrame {
        history: history.pushed(proprio.clone())?,
        proprio,
        privileged: privileged_block(step, cmd),
        terrain: vec![0.0; TERRAIN_DIM],
        commands: cmd.to_array(),
        indicator,
        key_state: key_state(step),
    };
    frame.check_dims()?;
    Ok(frame)
}
