//! A scripted stand-in for a trained policy plus physics. The base follows
//! the commanded velocity and posture through a first-order lag, the feet
//! follow the swing targets exactly, and contact forces are synthesized.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::command::{sample_command, CommandRanges, CommandVector};
use crate::error::{Error, Result};
use crate::gait::{PhaseState, DEFAULT_DT};
use crate::intervention::{
    advance_noise, blend_with_policy, step_indicator, InterventionState, NoiseBox,
};
use crate::layout::JointLayout;
use crate::obs::{assemble_observation, ObservationFrame, ProprioHistory};
use crate::rollout::log::{LogRecord, RolloutLog, RolloutMeta};
use crate::step::{FootState, RobotStep};
use crate::swing::{stride_offset, target_height, SwingProfile, SWING_START};

/// Pelvis height of the nominal standing pose (m).
pub const NOMINAL_BASE_HEIGHT: f64 = 0.98;
/// Lateral hip offsets, left then right (m).
pub const HIP_OFFSETS: [[f64; 2]; 2] = [[0.0, 0.1], [0.0, -0.1]];
pub const ROBOT_MASS: f64 = 51.0;
pub const GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterventionSettings {
    pub p_flip: f64,
    /// Noise blend fraction.
    pub alpha: f64,
    pub t_interval: u64,
    /// Fraction of each joint range kept clear of the limits.
    pub margin: f64,
}

impl Default for InterventionSettings {
    fn default() -> Self {
        Self {
            p_flip: crate::intervention::DEFAULT_P_FLIP,
            alpha: 1.0,
            t_interval: crate::intervention::DEFAULT_T_INTERVAL,
            margin: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub command: CommandVector,
    pub steps: usize,
    pub dt: f64,
    /// First-order lag time constant (s); 0 tracks commands instantly.
    pub lag: f64,
    pub seed: u64,
    pub intervention: Option<InterventionSettings>,
    /// Draw a fresh command from `ranges` every this many steps.
    pub resample_every: Option<usize>,
    pub ranges: Option<CommandRanges>,
}

impl OracleConfig {
    pub fn new(command: CommandVector, steps: usize) -> Self {
        Self {
            command,
            steps,
            dt: DEFAULT_DT,
            lag: 0.0,
            seed: 0,
            intervention: None,
            resample_every: None,
            ranges: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param("dt", "must be finite and > 0"));
        }
        if !(self.lag.is_finite() && self.lag >= 0.0) {
            return Err(Error::param("lag", "must be finite and >= 0"));
        }
        if self.resample_every == Some(0) {
            return Err(Error::param("resample_every", "must be >= 1"));
        }
        self.command.gait.validate()
    }

    /// Per-step retention `exp(−dt/τ)` of the lag filter.
    pub fn lag_retention(&self) -> f64 {
        if self.lag == 0.0 {
            0.0
        } else {
            (-self.dt / self.lag).exp()
        }
    }
}

/// Mean absolute error of a first-order lag starting `delta` away from a
/// constant target, averaged over steps `1..=n` after the first update.
pub fn lag_mean_error(delta: f64, retention: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let a = retention;
    if a == 0.0 {
        return 0.0;
    }
    delta.abs() * a * (1.0 - a.powi(n as i32)) / ((1.0 - a) * n as f64)
}

fn rotate(yaw: f64, v: [f64; 2]) -> [f64; 2] {
    let (s, c) = yaw.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

/// Filtered quantities tracking the command.
#[derive(Debug, Clone, Copy, Default)]
struct Tracked {
    vx: f64,
    vy: f64,
    omega: f64,
    h: f64,
    p: f64,
    w: f64,
}

impl Tracked {
    fn relax(&mut self, cmd: &CommandVector, a: f64) {
        let f = |x: &mut f64, target: f64| *x = target + a * (*x - target);
        f(&mut self.vx, cmd.task.vx);
        f(&mut self.vy, cmd.task.vy);
        f(&mut self.omega, cmd.task.omega);
        f(&mut self.h, cmd.behavior.body_height);
        f(&mut self.p, cmd.behavior.body_pitch);
        f(&mut self.w, cmd.behavior.waist_yaw);
    }
}

pub struct OracleRobot {
    config: OracleConfig,
    layout: JointLayout,
    rng: ChaCha8Rng,
    command: CommandVector,
    phase: PhaseState,
    tracked: Tracked,
    base_xy: [f64; 2],
    yaw: f64,
    feet: [[f64; 3]; 2],
    joint_pos: Vec<f64>,
    joint_vel: Vec<f64>,
    actions: [Vec<f64>; 3],
    intervention: Option<(InterventionState, NoiseBox)>,
    history: ProprioHistory,
    index: u64,
}

impl OracleRobot {
    pub fn new(config: OracleConfig, layout: JointLayout) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut command = config.command;
        if config.resample_every.is_some() {
            let ranges = config
                .ranges
                .clone()
                .unwrap_or_else(|| CommandRanges::for_gait(command.gait.kind));
            command = sample_command(&ranges, command.gait, None, &mut rng)?;
        }
        let phase = PhaseState::new(command.gait, command.behavior.frequency, config.dt)?;
        let nominal = layout.nominal_pose();
        let upper = layout.upper_indices();
        let intervention = match &config.intervention {
            Some(s) => {
                let mut state = InterventionState::new(upper.iter().map(|&i| nominal[i]).collect());
                state.p_flip = s.p_flip;
                state.alpha = s.alpha;
                state.t_interval = s.t_interval;
                state.validate()?;
                Some((state, NoiseBox::from_layout(&layout, s.margin)?))
            }
            None => None,
        };
        let feet = HIP_OFFSETS.map(|h| [h[0], h[1], 0.0]);
        Ok(Self {
            rng,
            command,
            phase,
            tracked: Tracked::default(),
            base_xy: [0.0; 2],
            yaw: 0.0,
            feet,
            joint_vel: vec![0.0; nominal.len()],
            actions: [nominal.clone(), nominal.clone(), nominal.clone()],
            joint_pos: nominal,
            intervention,
            history: ProprioHistory::zeros(),
            index: 0,
            layout,
            config,
        })
    }

    pub fn command(&self) -> &CommandVector {
        &self.command
    }

    /// Advances one control step and returns the resulting snapshot with
    /// the command that produced it.
    pub fn step(&mut self) -> Result<LogRecord> {
        let dt = self.config.dt;
        let k = self.index;
        if k > 0 {
            if let (Some(n), Some(ranges)) = (self.config.resample_every, self.resample_ranges()) {
                if (k as usize).is_multiple_of(n) {
                    self.command = sample_command(&ranges, self.command.gait, None, &mut self.rng)?;
                    self.phase.frequency = self.command.behavior.frequency;
                }
            }
            self.phase = self.phase.advance()?;
        }
        let cmd = self.command.with_clocks(&self.phase)?;
        let phase_bar = self.phase.homogenized()?;

        self.tracked.relax(&cmd, self.config.lag_retention());
        let tr = self.tracked;
        self.yaw += tr.omega * dt;
        let v_world = rotate(self.yaw, [tr.vx, tr.vy]);
        self.base_xy = [
            self.base_xy[0] + v_world[0] * dt,
            self.base_xy[1] + v_world[1] * dt,
        ];
        let base_z = NOMINAL_BASE_HEIGHT + tr.h;

        let profile = SwingProfile {
            duty_cycle: cmd.behavior.duty_cycle,
            ..SwingProfile::flat(cmd.behavior.swing_height)
        };
        let stance: Vec<bool> = phase_bar.iter().map(|&p| p < SWING_START).collect();
        let n_stance = stance.iter().filter(|s| **s).count();
        let mut feet = [FootState::default(); 2];
        for i in 0..2 {
            let old = self.feet[i];
            let mut pos = old;
            if !stance[i] {
                let off = stride_offset(
                    phase_bar[i],
                    [tr.vx, tr.vy],
                    cmd.behavior.frequency,
                    cmd.behavior.duty_cycle,
                )
                .unwrap_or([0.0; 2]);
                let local = [HIP_OFFSETS[i][0] + off[0], HIP_OFFSETS[i][1] + off[1]];
                let w = rotate(self.yaw, local);
                pos = [self.base_xy[0] + w[0], self.base_xy[1] + w[1], 0.0];
            }
            pos[2] = target_height(phase_bar[i], &profile)?;
            let rel = rotate(
                -self.yaw,
                [pos[0] - self.base_xy[0], pos[1] - self.base_xy[1]],
            );
            let normal = if stance[i] {
                ROBOT_MASS * GRAVITY / n_stance as f64
            } else {
                0.0
            };
            feet[i] = FootState {
                position: pos,
                position_base: [rel[0], rel[1], pos[2] - base_z],
                velocity_xy: [(pos[0] - old[0]) / dt, (pos[1] - old[1]) / dt],
                swing_height: pos[2],
                contact_force: [0.0, 0.0, normal],
            };
            self.feet[i] = pos;
        }

        // joints: nominal legs, waist follows the yaw command, arms follow
        // the intervention signal while it is active
        let nominal = self.layout.nominal_pose();
        let mut q = nominal.clone();
        if let Some(wi) = self.layout.waist_index() {
            q[wi] += tr.w;
        }
        let mut active = false;
        if let Some((state, bounds)) = self.intervention.as_mut() {
            let next = step_indicator(state, &mut self.rng);
            let (next, noise) = advance_noise(&next, k, bounds, &mut self.rng)?;
            active = next.active;
            if active {
                let upper = self.layout.upper_indices();
                let policy: Vec<f64> = upper.iter().map(|&i| nominal[i]).collect();
                let blended = blend_with_policy(&policy, &noise, next.alpha)?;
                for (&i, v) in upper.iter().zip(blended) {
                    q[i] = v;
                }
            }
            *state = next;
        }
        let qd: Vec<f64> = q
            .iter()
            .zip(&self.joint_pos)
            .map(|(a, b)| (a - b) / dt)
            .collect();
        let qdd: Vec<f64> = qd
            .iter()
            .zip(&self.joint_vel)
            .map(|(a, b)| (a - b) / dt)
            .collect();
        self.actions = [q.clone(), self.actions[0].clone(), self.actions[1].clone()];

        let step = RobotStep {
            index: k,
            t: k as f64 * dt,
            base_lin_vel: [tr.vx, tr.vy, 0.0],
            base_ang_vel: [0.0, 0.0, tr.omega],
            base_rpy: [0.0, tr.p, self.yaw],
            body_height: tr.h,
            body_pitch: tr.p,
            waist_yaw: tr.w,
            joint_torque: vec![0.0; q.len()],
            joint_acc: qdd,
            joint_vel: qd.clone(),
            joint_pos: q.clone(),
            feet,
            action: self.actions[0].clone(),
            prev_action: self.actions[1].clone(),
            prev_prev_action: self.actions[2].clone(),
            phase: self.phase.phi,
            phase_bar,
            intervention: active,
            terminated: false,
            friction: 1.0,
            collisions: Default::default(),
        };
        self.joint_pos = q;
        self.joint_vel = qd;
        self.index += 1;
        Ok(LogRecord { step, command: cmd })
    }

    /// Actor/critic observation for a step just produced, updating the
    /// proprioceptive history.
    pub fn observe(&mut self, record: &LogRecord) -> Result<ObservationFrame> {
        let frame = assemble_observation(
            &record.step,
            &record.command,
            &self.history,
            record.step.intervention,
        )?;
        self.history = frame.history.clone();
        Ok(frame)
    }

    fn resample_ranges(&self) -> Option<CommandRanges> {
        self.config.resample_every?;
        Some(
            self.config
                .ranges
                .clone()
                .unwrap_or_else(|| CommandRanges::for_gait(self.command.gait.kind)),
        )
    }
}

/// Runs the oracle for `config.steps` steps, assembling observations along
/// the way, and returns the log.
pub fn run_oracle_rollout(config: &OracleConfig) -> Result<RolloutLog> {
    run_oracle_rollout_with_layout(config, JointLayout::h1())
}

pub fn run_oracle_rollout_with_layout(
    config: &OracleConfig,
    layout: JointLayout,
) -> Result<RolloutLog> {
    let mut robot = OracleRobot::new(config.clone(), layout)?;
    let mut records = Vec::with_capacity(config.steps);
    for _ in 0..config.steps {
        let rec = robot.step()?;
        robot.observe(&rec)?;
        records.push(rec);
    }
    Ok(RolloutLog {
        meta: RolloutMeta {
            generator: "oracle".to_string(),
            seed: config.seed,
            dt: config.dt,
            steps: config.steps,
            lag: config.lag,
            p_flip: config.intervention.map(|s| s.p_flip),
            resample_every: config.resample_every,
        },
        records,
    })
}
