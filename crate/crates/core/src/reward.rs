//! Reward terms with their weights, grouped as task, behavior and
//! regularization rewards, plus the intervention reward mask.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::command::CommandVector;
use crate::error::{Error, Result};
use crate::gait::{contact_probability, ContactModelParams};
use crate::layout::JointLayout;
use crate::step::RobotStep;
use crate::swing::{target_height, SwingProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RewardGroup {
    Task,
    Behavior,
    Regularization,
}

/// One row of the reward table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardTerm {
    LinearVelocityTracking,
    AngularVelocityTracking,
    BodyHeightTracking,
    BodyPitchTracking,
    WaistYawTracking,
    FootSwingTracking,
    ContactSwingTracking,
    RollPitchAngularVelocity,
    VerticalBodyMovement,
    FeetSlip,
    ActionRate,
    ActionSmoothness,
    JointTorque,
    JointAcceleration,
    UpperJointDeviation,
    HipJointDeviation,
    FeetSymmetry,
    Termination,
}

impl RewardTerm {
    pub const ALL: [RewardTerm; 18] = [
        RewardTerm::LinearVelocityTracking,
        RewardTerm::AngularVelocityTracking,
        RewardTerm::BodyHeightTracking,
        RewardTerm::BodyPitchTracking,
        RewardTerm::WaistYawTracking,
        RewardTerm::FootSwingTracking,
        RewardTerm::ContactSwingTracking,
        RewardTerm::RollPitchAngularVelocity,
        RewardTerm::VerticalBodyMovement,
        RewardTerm::FeetSlip,
        RewardTerm::ActionRate,
        RewardTerm::ActionSmoothness,
        RewardTerm::JointTorque,
        RewardTerm::JointAcceleration,
        RewardTerm::UpperJointDeviation,
        RewardTerm::HipJointDeviation,
        RewardTerm::FeetSymmetry,
        RewardTerm::Termination,
    ];

    pub fn group(self) -> RewardGroup {
        use RewardTerm::*;
        match self {
            LinearVelocityTracking | AngularVelocityTracking => RewardGroup::Task,
            BodyHeightTracking | BodyPitchTracking | WaistYawTracking | FootSwingTracking
            | ContactSwingTracking => RewardGroup::Behavior,
            _ => RewardGroup::Regularization,
        }
    }

    pub fn name(self) -> &'static str {
        use RewardTerm::*;
        match self {
            LinearVelocityTracking => "linear_velocity_tracking",
            AngularVelocityTracking => "angular_velocity_tracking",
            BodyHeightTracking => "body_height_tracking",
            BodyPitchTracking => "body_pitch_tracking",
            WaistYawTracking => "waist_yaw_tracking",
            FootSwingTracking => "foot_swing_tracking",
            ContactSwingTracking => "contact_swing_tracking",
            RollPitchAngularVelocity => "roll_pitch_angular_velocity",
            VerticalBodyMovement => "vertical_body_movement",
            FeetSlip => "feet_slip",
            ActionRate => "action_rate",
            ActionSmoothness => "action_smoothness",
            JointTorque => "joint_torque",
            JointAcceleration => "joint_acceleration",
            UpperJointDeviation => "upper_joint_deviation",
            HipJointDeviation => "hip_joint_deviation",
            FeetSymmetry => "feet_symmetry",
            Termination => "termination",
        }
    }

    /// Whether the term only concerns the externally controllable upper body.
    pub fn is_upper_body_only(self) -> bool {
        self == RewardTerm::UpperJointDeviation
    }
}

impl fmt::Display for RewardTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardWeights {
    pub linear_velocity_tracking: f64,
    pub angular_velocity_tracking: f64,
    pub body_height_tracking: f64,
    pub body_pitch_tracking: f64,
    pub waist_yaw_tracking: f64,
    pub foot_swing_tracking: f64,
    pub contact_swing_tracking: f64,
    pub roll_pitch_angular_velocity: f64,
    pub vertical_body_movement: f64,
    pub feet_slip: f64,
    pub action_rate: f64,
    pub action_smoothness: f64,
    pub joint_torque: f64,
    pub joint_acceleration: f64,
    pub upper_joint_deviation: f64,
    pub hip_joint_deviation: f64,
    pub feet_symmetry: f64,
    pub termination: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        Self {
            linear_velocity_tracking: 2.0,
            angular_velocity_tracking: 2.0,
            body_height_tracking: -40.0,
            body_pitch_tracking: -10.0,
            waist_yaw_tracking: -2.0,
            foot_swing_tracking: -30.0,
            contact_swing_tracking: -2.0,
            roll_pitch_angular_velocity: -0.5,
            vertical_body_movement: -0.1,
            feet_slip: -0.2,
            action_rate: -0.01,
            action_smoothness: -0.01,
            joint_torque: -5e-6,
            joint_acceleration: -2.5e-7,
            upper_joint_deviation: -0.5,
            hip_joint_deviation: -2.0,
            feet_symmetry: -5.0,
            termination: -200.0,
        }
    }
}

impl RewardWeights {
    pub fn get(&self, term: RewardTerm) -> f64 {
        use RewardTerm::*;
        match term {
            LinearVelocityTracking => self.linear_velocity_tracking,
            AngularVelocityTracking => self.angular_velocity_tracking,
            BodyHeightTracking => self.body_height_tracking,
            BodyPitchTracking => self.body_pitch_tracking,
            WaistYawTracking => self.waist_yaw_tracking,
            FootSwingTracking => self.foot_swing_tracking,
            ContactSwingTracking => self.contact_swing_tracking,
            RollPitchAngularVelocity => self.roll_pitch_angular_velocity,
            VerticalBodyMovement => self.vertical_body_movement,
            FeetSlip => self.feet_slip,
            ActionRate => self.action_rate,
            ActionSmoothness => self.action_smoothness,
            JointTorque => self.joint_torque,
            JointAcceleration => self.joint_acceleration,
            UpperJointDeviation => self.upper_joint_deviation,
            HipJointDeviation => self.hip_joint_deviation,
            FeetSymmetry => self.feet_symmetry,
            Termination => self.termination,
        }
    }
}

/// How the exponent of the contact-swing reward is signed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactRewardForm {
    /// `1 − exp(+‖x‖²/σ)`, with the exponent argument clamped.
    #[default]
    AsPrinted,
    /// `1 − exp(−‖x‖²/σ)`.
    NegatedExponent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactSwingParams {
    pub sigma_force: f64,
    pub sigma_velocity: f64,
    pub exponent_clamp: f64,
    pub form: ContactRewardForm,
}

impl Default for ContactSwingParams {
    fn default() -> Self {
        Self {
            sigma_force: 50.0,
            sigma_velocity: 5.0,
            exponent_clamp: 20.0,
            form: ContactRewardForm::AsPrinted,
        }
    }
}

/// Everything besides the step and command that the rewards depend on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardContext {
    pub weights: RewardWeights,
    pub contact: ContactModelParams,
    pub contact_swing: ContactSwingParams,
    pub upper_indices: Vec<usize>,
    pub hip_xz_indices: Vec<usize>,
    pub nominal_pose: Vec<f64>,
    /// Lift-off and touchdown heights of the swing target.
    pub swing_start_z: f64,
    pub swing_end_z: f64,
    /// `|φ̄₁ − φ̄₂|` below which the feet count as in phase.
    pub symmetry_tolerance: f64,
}

impl RewardContext {
    pub fn new(layout: &JointLayout) -> Self {
        Self {
            weights: RewardWeights::default(),
            contact: ContactModelParams::default(),
            contact_swing: ContactSwingParams::default(),
            upper_indices: layout.upper_indices(),
            hip_xz_indices: layout.hip_xz_indices(),
            nominal_pose: layout.nominal_pose(),
            swing_start_z: 0.0,
            swing_end_z: 0.0,
            symmetry_tolerance: 1e-9,
        }
    }

    pub fn swing_profile(&self, cmd: &CommandVector) -> SwingProfile {
        SwingProfile {
            apex: cmd.behavior.swing_height,
            start_z: self.swing_start_z,
            end_z: self.swing_end_z,
            duty_cycle: cmd.behavior.duty_cycle,
        }
    }

    pub fn contact_probabilities(&self, step: &RobotStep) -> Result<[f64; 2]> {
        Ok([
            contact_probability(step.phase_bar[0], &self.contact)?,
            contact_probability(step.phase_bar[1], &self.contact)?,
        ])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermValue {
    pub term: RewardTerm,
    /// Value of the table definition before weighting.
    pub raw: f64,
    pub weighted: f64,
    pub masked: bool,
}

impl TermValue {
    fn new(term: RewardTerm, raw: f64, weights: &RewardWeights) -> Self {
        Self {
            term,
            raw,
            weighted: weights.get(term) * raw,
            masked: false,
        }
    }

    /// Contribution to the total (zero when masked).
    pub fn contribution(&self) -> f64 {
        if self.masked {
            0.0
        } else {
            self.weighted
        }
    }
}

/// All reward terms of one step, in table order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub terms: Vec<TermValue>,
}

impl RewardBreakdown {
    pub fn get(&self, term: RewardTerm) -> Option<&TermValue> {
        self.terms.iter().find(|t| t.term == term)
    }

    pub fn total(&self) -> f64 {
        self.terms.iter().map(TermValue::contribution).sum()
    }

    pub fn group_total(&self, group: RewardGroup) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.term.group() == group)
            .map(TermValue::contribution)
            .sum()
    }
}

fn sq_norm(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().map(|x| x * x).sum()
}

fn sq_diff(a: &[f64], b: &[f64]) -> f64 {
    sq_norm(a.iter().zip(b).map(|(x, y)| x - y))
}

fn sq_dev_at(q: &[f64], nominal: &[f64], idx: &[usize]) -> f64 {
    sq_norm(idx.iter().map(|&i| q[i] - nominal[i]))
}

fn raw_velocity_tracking(step: &RobotStep, cmd: &CommandVector) -> (f64, f64) {
    let dv = sq_norm([
        cmd.task.vx - step.base_lin_vel[0],
        cmd.task.vy - step.base_lin_vel[1],
    ]);
    let dw = sq_norm([cmd.task.omega - step.base_ang_vel[2]]);
    ((-dv / 0.2).exp(), (-dw / 0.2).exp())
}

/// Weighted linear and angular velocity tracking rewards.
pub fn reward_velocity_tracking(
    step: &RobotStep,
    cmd: &CommandVector,
    weights: &RewardWeights,
) -> (f64, f64) {
    let (lin, ang) = raw_velocity_tracking(step, cmd);
    (
        weights.linear_velocity_tracking * lin,
        weights.angular_velocity_tracking * ang,
    )
}

fn raw_posture(step: &RobotStep, cmd: &CommandVector) -> [f64; 3] {
    let b = &cmd.behavior;
    [
        (b.body_height - step.body_height).powi(2),
        (b.body_pitch - step.body_pitch).powi(2),
        (b.waist_yaw - step.waist_yaw).powi(2),
    ]
}

/// Weighted body height, body pitch and waist yaw tracking penalties.
pub fn reward_posture(step: &RobotStep, cmd: &CommandVector, weights: &RewardWeights) -> [f64; 3] {
    let [h, p, w] = raw_posture(step, cmd);
    [
        weights.body_height_tracking * h,
        weights.body_pitch_tracking * p,
        weights.waist_yaw_tracking * w,
    ]
}

fn raw_foot_swing(
    step: &RobotStep,
    profile: &SwingProfile,
    contact_probs: [f64; 2],
) -> Result<f64> {
    let mut sum = 0.0;
    for (foot, (&phi_bar, c)) in step
        .feet
        .iter()
        .zip(step.phase_bar.iter().zip(contact_probs))
    {
        let target = target_height(phi_bar, profile)?;
        sum += (1.0 - c) * (target - foot.swing_height).powi(2);
    }
    Ok(sum)
}

/// Weighted swing-height tracking penalty, gated per foot by `1 − C`.
pub fn reward_foot_swing(
    step: &RobotStep,
    cmd: &CommandVector,
    contact_probs: [f64; 2],
    ctx: &RewardContext,
) -> Result<f64> {
    let raw = raw_foot_swing(step, &ctx.swing_profile(cmd), contact_probs)?;
    Ok(ctx.weights.foot_swing_tracking * raw)
}

fn raw_contact_swing(step: &RobotStep, contact_probs: [f64; 2], p: &ContactSwingParams) -> f64 {
    let kernel = |x: f64, sigma: f64| -> f64 {
        match p.form {
            ContactRewardForm::AsPrinted => 1.0 - (x / sigma).min(p.exponent_clamp).exp(),
            ContactRewardForm::NegatedExponent => 1.0 - (-x / sigma).exp(),
        }
    };
    let mut sum = 0.0;
    for (foot, c) in step.feet.iter().zip(contact_probs) {
        let force = sq_norm(foot.contact_force);
        let vel = sq_norm(foot.velocity_xy);
        sum -= (1.0 - c) * kernel(force, p.sigma_force);
        sum -= c * kernel(vel, p.sigma_velocity);
    }
    sum
}

/// Weighted contact-swing reward: swing feet are judged on contact force,
/// stance feet on horizontal velocity.
pub fn reward_contact_swing(
    step: &RobotStep,
    contact_probs: [f64; 2],
    params: &ContactSwingParams,
    weights: &RewardWeights,
) -> f64 {
    weights.contact_swing_tracking * raw_contact_swing(step, contact_probs, params)
}

/// The eleven regularization terms.
pub fn reward_regularization(step: &RobotStep, ctx: &RewardContext) -> Vec<TermValue> {
    use RewardTerm::*;
    let w = &ctx.weights;
    let slip = 1.0
        - step
            .feet
            .iter()
            .map(|f| (-sq_norm(f.velocity_xy)).exp())
            .sum::<f64>();
    let smooth = sq_norm(
        step.prev_prev_action
            .iter()
            .zip(&step.prev_action)
            .zip(&step.action)
            .map(|((a2, a1), a0)| a2 - 2.0 * a1 + a0),
    );
    let in_phase = (step.phase_bar[0] - step.phase_bar[1]).abs() < ctx.symmetry_tolerance;
    let symmetry = if in_phase {
        let (a, b) = (step.feet[0].position_base, step.feet[1].position_base);
        sq_norm([a[0] - b[0], a[2] - b[2]])
    } else {
        0.0
    };
    vec![
        TermValue::new(
            RollPitchAngularVelocity,
            sq_norm(step.base_ang_vel[..2].iter().copied()),
            w,
        ),
        TermValue::new(VerticalBodyMovement, step.base_lin_vel[2].powi(2), w),
        TermValue::new(FeetSlip, slip, w),
        TermValue::new(ActionRate, sq_diff(&step.action, &step.prev_action), w),
        TermValue::new(ActionSmoothness, smooth, w),
        TermValue::new(JointTorque, sq_norm(step.joint_torque.iter().copied()), w),
        TermValue::new(
            JointAcceleration,
            sq_norm(step.joint_acc.iter().copied()),
            w,
        ),
        TermValue::new(
            UpperJointDeviation,
            sq_dev_at(&step.joint_pos, &ctx.nominal_pose, &ctx.upper_indices),
            w,
        ),
        TermValue::new(
            HipJointDeviation,
            sq_dev_at(&step.joint_pos, &ctx.nominal_pose, &ctx.hip_xz_indices),
            w,
        ),
        TermValue::new(FeetSymmetry, symmetry, w),
        TermValue::new(Termination, if step.terminated { 1.0 } else { 0.0 }, w),
    ]
}

/// Evaluates every term for one step. The intervention mask is not applied.
pub fn compute_rewards(
    step: &RobotStep,
    cmd: &CommandVector,
    ctx: &RewardContext,
) -> Result<RewardBreakdown> {
    use RewardTerm::*;
    step.validate()?;
    let n = ctx.nominal_pose.len();
    if step.joint_pos.len() != n
        || ctx
            .upper_indices
            .iter()
            .chain(&ctx.hip_xz_indices)
            .any(|&i| i >= n)
    {
        return Err(Error::DimensionMismatch {
            what: "reward joint layout",
            expected: n,
            got: step.joint_pos.len(),
        });
    }
    let w = &ctx.weights;
    let probs = ctx.contact_probabilities(step)?;
    let (lin, ang) = raw_velocity_tracking(step, cmd);
    let [h, p, wy] = raw_posture(step, cmd);
    let mut terms = vec![
        TermValue::new(LinearVelocityTracking, lin, w),
        TermValue::new(AngularVelocityTracking, ang, w),
        TermValue::new(BodyHeightTracking, h, w),
        TermValue::new(BodyPitchTracking, p, w),
        TermValue::new(WaistYawTracking, wy, w),
        TermValue::new(
            FootSwingTracking,
            raw_foot_swing(step, &ctx.swing_profile(cmd), probs)?,
            w,
        ),
        TermValue::new(
            ContactSwingTracking,
            raw_contact_swing(step, probs, &ctx.contact_swing),
            w,
        ),
    ];
    terms.extend(reward_regularization(step, ctx));
    debug_assert_eq!(terms.len(), RewardTerm::ALL.len());
    if terms.iter().any(|t| !t.weighted.is_finite()) {
        return Err(Error::NonFinite("reward term"));
    }
    Ok(RewardBreakdown { terms })
}

/// Masks upper-body-only regularizers while an external controller owns
/// the arms. Idempotent; with `intervention == false` the breakdown is
/// returned unchanged.
pub fn apply_intervention_mask(
    mut breakdown: RewardBreakdown,
    intervention: bool,
) -> RewardBreakdown {
    if intervention {
        for t in breakdown.terms.iter_mut() {
            if t.term.is_upper_body_only() {
                t.masked = true;
            }
        }
    }
    breakdown
}
