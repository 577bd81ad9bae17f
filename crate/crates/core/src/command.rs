//! Task and behavior commands, their ranges, sampling, and the speed-grid
//! and intervention-noise curricula.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gait::{clock_values, GaitKind, GaitPreset, PhaseState, DEFAULT_DT};

/// Width of the extended behavior command.
pub const EXTENDED_BEHAVIOR_DIM: usize = 9;
/// Task (3) plus extended behavior (9) channels.
pub const COMMAND_DIM: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TaskCommand {
    pub vx: f64,
    pub vy: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BehaviorCommand {
    /// Gait frequency (Hz).
    pub frequency: f64,
    /// Foot swing apex (m).
    pub swing_height: f64,
    /// Body height offset from nominal (m).
    pub body_height: f64,
    pub body_pitch: f64,
    pub waist_yaw: f64,
    pub phase_offset: f64,
    pub duty_cycle: f64,
    /// `[Cl_L, Cl_R]`.
    pub clock: [f64; 2],
}

/// Everything the policy is told to do at one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommandVector {
    pub gait: GaitPreset,
    pub task: TaskCommand,
    pub behavior: BehaviorCommand,
}

impl CommandVector {
    /// All channels at their defaults, clocks at the gait's initial phases.
    pub fn defaults(gait: GaitPreset) -> Self {
        let ranges = CommandRanges::for_gait(gait.kind);
        let d = |c: Channel| ranges.get(c).default;
        let mut cmd = Self {
            gait,
            task: TaskCommand {
                vx: d(Channel::Vx),
                vy: d(Channel::Vy),
                omega: d(Channel::Omega),
            },
            behavior: BehaviorCommand {
                frequency: d(Channel::Frequency),
                swing_height: d(Channel::SwingHeight),
                body_height: d(Channel::BodyHeight),
                body_pitch: d(Channel::BodyPitch),
                waist_yaw: d(Channel::WaistYaw),
                phase_offset: gait.phase_offset,
                duty_cycle: gait.duty_cycle,
                clock: [0.0; 2],
            },
        };
        cmd.fill_initial_clocks();
        cmd
    }

    fn fill_initial_clocks(&mut self) {
        if let Ok(state) = PhaseState::new(self.gait, self.behavior.frequency, DEFAULT_DT) {
            if let Ok((l, r)) = clock_values(&state) {
                self.behavior.clock = [l, r];
            }
        }
    }

    /// Copy with clock channels taken from `phase`.
    pub fn with_clocks(mut self, phase: &PhaseState) -> Result<Self> {
        let (l, r) = clock_values(phase)?;
        self.behavior.clock = [l, r];
        Ok(self)
    }

    /// Extended behavior command in wire order
    /// `(f, l, h, p, w, ψ, φ_stance, Cl_L, Cl_R)`.
    pub fn extended_behavior(&self) -> [f64; EXTENDED_BEHAVIOR_DIM] {
        let b = &self.behavior;
        [
            b.frequency,
            b.swing_height,
            b.body_height,
            b.body_pitch,
            b.waist_yaw,
            b.phase_offset,
            b.duty_cycle,
            b.clock[0],
            b.clock[1],
        ]
    }

    /// `(vx, vy, ω)` followed by the extended behavior command.
    pub fn to_array(&self) -> [f64; COMMAND_DIM] {
        let mut out = [0.0; COMMAND_DIM];
        out[..3].copy_from_slice(&[self.task.vx, self.task.vy, self.task.omega]);
        out[3..].copy_from_slice(&self.extended_behavior());
        out
    }

    pub fn get(&self, channel: Channel) -> f64 {
        match channel {
            Channel::Vx => self.task.vx,
            Channel::Vy => self.task.vy,
            Channel::Omega => self.task.omega,
            Channel::Frequency => self.behavior.frequency,
            Channel::SwingHeight => self.behavior.swing_height,
            Channel::BodyHeight => self.behavior.body_height,
            Channel::BodyPitch => self.behavior.body_pitch,
            Channel::WaistYaw => self.behavior.waist_yaw,
        }
    }

    pub fn set(&mut self, channel: Channel, value: f64) {
        match channel {
            Channel::Vx => self.task.vx = value,
            Channel::Vy => self.task.vy = value,
            Channel::Omega => self.task.omega = value,
            Channel::Frequency => self.behavior.frequency = value,
            Channel::SwingHeight => self.behavior.swing_height = value,
            Channel::BodyHeight => self.behavior.body_height = value,
            Channel::BodyPitch => self.behavior.body_pitch = value,
            Channel::WaistYaw => self.behavior.waist_yaw = value,
        }
    }
}

/// The eight sampled command channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Channel {
    Vx,
    Vy,
    Omega,
    Frequency,
    SwingHeight,
    BodyHeight,
    BodyPitch,
    WaistYaw,
}

impl Channel {
    pub const ALL: [Channel; 8] = [
        Channel::Vx,
        Channel::Vy,
        Channel::Omega,
        Channel::Frequency,
        Channel::SwingHeight,
        Channel::BodyHeight,
        Channel::BodyPitch,
        Channel::WaistYaw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Channel::Vx => "vx",
            Channel::Vy => "vy",
            Channel::Omega => "omega",
            Channel::Frequency => "f",
            Channel::SwingHeight => "l",
            Channel::BodyHeight => "h",
            Channel::BodyPitch => "p",
            Channel::WaistYaw => "w",
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    /// Channels a hopping gait is allowed to vary.
    pub fn hopping_supported(self) -> bool {
        matches!(
            self,
            Channel::Vx | Channel::Vy | Channel::Omega | Channel::BodyHeight
        )
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Channel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Channel::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown command channel `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelRange {
    pub default: f64,
    pub initial: [f64; 2],
    pub finishing: [f64; 2],
}

impl ChannelRange {
    pub const fn new(default: f64, initial: [f64; 2], finishing: [f64; 2]) -> Self {
        Self {
            default,
            initial,
            finishing,
        }
    }

    pub const fn fixed(value: f64) -> Self {
        Self::new(value, [value, value], [value, value])
    }

    fn validate(&self, channel: Channel) -> Result<()> {
        let [lo, hi] = self.initial;
        let [flo, fhi] = self.finishing;
        let ok = [self.default, lo, hi, flo, fhi]
            .iter()
            .all(|v| v.is_finite())
            && lo <= hi
            && flo <= fhi
            && lo <= self.default
            && self.default <= hi
            && flo <= lo
            && hi <= fhi;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "channel `{channel}` needs default ∈ initial ⊆ finishing with non-empty ranges, got {self:?}"
            )))
        }
    }
}

/// Per-channel defaults and curriculum ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandRanges {
    channels: [ChannelRange; 8],
}

impl CommandRanges {
    /// Ranges shared by walking, jumping and standing.
    pub fn standard() -> Self {
        Self {
            channels: [
                ChannelRange::new(0.0, [-0.6, 0.6], [-0.6, 2.0]),
                ChannelRange::new(0.0, [-0.6, 0.6], [-0.6, 0.6]),
                ChannelRange::new(0.0, [-0.6, 0.6], [-1.0, 1.0]),
                ChannelRange::new(2.0, [1.5, 3.5], [1.5, 3.5]),
                ChannelRange::new(0.15, [0.1, 0.35], [0.1, 0.35]),
                ChannelRange::new(0.0, [-0.3, 0.0], [-0.3, 0.0]),
                ChannelRange::new(0.0, [0.0, 0.4], [0.0, 0.4]),
                ChannelRange::new(0.0, [-1.0, 1.0], [-1.0, 1.0]),
            ],
        }
    }

    /// Hopping only varies `{vx, vy, ω, h}`; the rest sit at their defaults.
    pub fn hopping() -> Self {
        let standard = Self::standard();
        let mut channels = standard.channels;
        for c in Channel::ALL {
            channels[c.index()] = match c {
                Channel::Vx | Channel::Vy | Channel::Omega => {
                    ChannelRange::new(0.0, [-0.6, 0.6], [-0.6, 0.6])
                }
                Channel::BodyHeight => ChannelRange::new(0.0, [-0.3, 0.0], [-0.3, 0.0]),
                _ => ChannelRange::fixed(standard.get(c).default),
            };
        }
        Self { channels }
    }

    pub fn for_gait(kind: GaitKind) -> Self {
        match kind {
            GaitKind::Hopping => Self::hopping(),
            _ => Self::standard(),
        }
    }

    /// Every channel pinned to its default.
    pub fn collapsed(&self) -> Self {
        let mut out = self.clone();
        for r in out.channels.iter_mut() {
            *r = ChannelRange::fixed(r.default);
        }
        out
    }

    pub fn get(&self, channel: Channel) -> &ChannelRange {
        &self.channels[channel.index()]
    }

    pub fn set(&mut self, channel: Channel, range: ChannelRange) -> Result<()> {
        range.validate(channel)?;
        self.channels[channel.index()] = range;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for c in Channel::ALL {
            self.get(c).validate(c)?;
        }
        Ok(())
    }

    /// Applies per-channel overrides keyed by channel name.
    pub fn apply_overrides(&mut self, overrides: &BTreeMap<String, RangeOverride>) -> Result<()> {
        for (name, o) in overrides {
            let c: Channel = name.parse()?;
            let mut r = *self.get(c);
            if let Some(v) = o.default {
                r.default = v;
            }
            if let Some(v) = o.initial {
                r.initial = v;
            }
            if let Some(v) = o.finishing {
                r.finishing = v;
            }
            self.set(c, r)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeOverride {
    pub default: Option<f64>,
    pub initial: Option<[f64; 2]>,
    pub finishing: Option<[f64; 2]>,
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, [lo, hi]: [f64; 2], what: Channel) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::Config(format!(
            "empty unlocked range [{lo}, {hi}] for `{what}`"
        )));
    }
    if lo == hi {
        return Ok(lo);
    }
    Ok(rng.random_range(lo..=hi))
}

/// Draws one command uniformly from the unlocked ranges.
///
/// With a speed grid, `(vx, ω)` come from a uniformly chosen unlocked bin;
/// otherwise from the initial ranges. Hopping pins the channels it does not
/// support to their defaults, and standing zeroes the task command.
pub fn sample_command<R: Rng + ?Sized>(
    ranges: &CommandRanges,
    gait: GaitPreset,
    grid: Option<&SpeedGrid>,
    rng: &mut R,
) -> Result<CommandVector> {
    ranges.validate()?;
    let mut cmd = CommandVector::defaults(gait);
    for c in Channel::ALL {
        let v = uniform(rng, ranges.get(c).initial, c)?;
        cmd.set(c, v);
    }
    if let Some(grid) = grid {
        let bin = grid.sample_bin(rng);
        let (vx, om) = grid.bin_bounds(bin);
        cmd.task.vx = uniform(rng, vx, Channel::Vx)?;
        cmd.task.omega = uniform(rng, om, Channel::Omega)?;
    }
    match gait.kind {
        GaitKind::Hopping => {
            for c in Channel::ALL.into_iter().filter(|c| !c.hopping_supported()) {
                cmd.set(c, ranges.get(c).default);
            }
        }
        GaitKind::Standing => cmd.task = TaskCommand::default(),
        _ => {}
    }
    cmd.behavior.phase_offset = gait.phase_offset;
    cmd.behavior.duty_cycle = gait.duty_cycle;
    cmd.fill_initial_clocks();
    Ok(cmd)
}

/// A pair of linear/angular quantities (rewards or thresholds).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinAng {
    pub linear: f64,
    pub angular: f64,
}

impl LinAng {
    pub const fn new(linear: f64, angular: f64) -> Self {
        Self { linear, angular }
    }
}

/// Default curriculum thresholds: 80% of the maximum weighted tracking reward.
pub const DEFAULT_TRACKING_THRESHOLDS: LinAng = LinAng::new(1.6, 1.6);

/// Adaptive grid over `(vx, ω)` bins spanning the finishing ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedGrid {
    vx: Axis,
    omega: Axis,
    unlocked: Vec<bool>,
    successes: Vec<u32>,
    default_bin: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Axis {
    lo: f64,
    width: f64,
    bins: usize,
}

impl Axis {
    fn new(range: [f64; 2], nominal_width: f64) -> Result<Self> {
        if !(nominal_width.is_finite() && nominal_width > 0.0) {
            return Err(Error::param(
                "bin_width",
                format!("{nominal_width} must be > 0"),
            ));
        }
        let span = range[1] - range[0];
        let bins = ((span / nominal_width).round() as usize).max(1);
        Ok(Self {
            lo: range[0],
            width: span / bins as f64,
            bins,
        })
    }

    fn bin_of(&self, x: f64) -> usize {
        let i = ((x - self.lo) / self.width).floor();
        (i.max(0.0) as usize).min(self.bins - 1)
    }

    fn bounds(&self, i: usize) -> [f64; 2] {
        [
            self.lo + i as f64 * self.width,
            self.lo + (i + 1) as f64 * self.width,
        ]
    }

    fn center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.width
    }
}

impl SpeedGrid {
    /// Grid over the finishing ranges of `vx` and `ω`; bins whose centres
    /// fall inside the initial ranges start unlocked.
    pub fn new(ranges: &CommandRanges, vx_width: f64, omega_width: f64) -> Result<Self> {
        let rv = ranges.get(Channel::Vx);
        let rw = ranges.get(Channel::Omega);
        let vx = Axis::new(rv.finishing, vx_width)?;
        let omega = Axis::new(rw.finishing, omega_width)?;
        let default_bin = (vx.bin_of(rv.default), omega.bin_of(rw.default));
        let mut unlocked = vec![false; vx.bins * omega.bins];
        for i in 0..vx.bins {
            for j in 0..omega.bins {
                let inside = |c: f64, [lo, hi]: [f64; 2]| c >= lo && c <= hi;
                if inside(vx.center(i), rv.initial) && inside(omega.center(j), rw.initial) {
                    unlocked[i * omega.bins + j] = true;
                }
            }
        }
        let mut grid = Self {
            vx,
            omega,
            successes: vec![0; unlocked.len()],
            unlocked,
            default_bin,
        };
        let d = grid.flat(default_bin);
        grid.unlocked[d] = true;
        Ok(grid)
    }

    /// 0.2 m/s × 0.2 rad/s bins.
    pub fn with_default_bins(ranges: &CommandRanges) -> Result<Self> {
        Self::new(ranges, 0.2, 0.2)
    }

    fn flat(&self, (i, j): (usize, usize)) -> usize {
        i * self.omega.bins + j
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.vx.bins, self.omega.bins)
    }

    pub fn default_bin(&self) -> (usize, usize) {
        self.default_bin
    }

    pub fn bin_of(&self, vx: f64, omega: f64) -> (usize, usize) {
        (self.vx.bin_of(vx), self.omega.bin_of(omega))
    }

    pub fn bin_bounds(&self, (i, j): (usize, usize)) -> ([f64; 2], [f64; 2]) {
        (self.vx.bounds(i), self.omega.bounds(j))
    }

    pub fn is_unlocked(&self, bin: (usize, usize)) -> bool {
        bin.0 < self.vx.bins && bin.1 < self.omega.bins && self.unlocked[self.flat(bin)]
    }

    pub fn successes(&self, bin: (usize, usize)) -> u32 {
        self.successes[self.flat(bin)]
    }

    pub fn unlocked_bins(&self) -> Vec<(usize, usize)> {
        (0..self.vx.bins)
            .flat_map(|i| (0..self.omega.bins).map(move |j| (i, j)))
            .filter(|&b| self.is_unlocked(b))
            .collect()
    }

    pub fn unlocked_count(&self) -> usize {
        self.unlocked.iter().filter(|u| **u).count()
    }

    pub fn is_fully_unlocked(&self) -> bool {
        self.unlocked.iter().all(|u| *u)
    }

    /// Whether the unlocked bins form one 4-connected region.
    pub fn is_connected(&self) -> bool {
        let start = self.default_bin;
        if !self.is_unlocked(start) {
            return false;
        }
        let mut seen = vec![false; self.unlocked.len()];
        let mut queue = VecDeque::from([start]);
        seen[self.flat(start)] = true;
        let mut count = 1;
        while let Some(b) = queue.pop_front() {
            for n in self.neighbours(b) {
                let k = self.flat(n);
                if self.unlocked[k] && !seen[k] {
                    seen[k] = true;
                    count += 1;
                    queue.push_back(n);
                }
            }
        }
        count == self.unlocked_count()
    }

    fn neighbours(&self, (i, j): (usize, usize)) -> impl Iterator<Item = (usize, usize)> {
        let (ni, nj) = (self.vx.bins as isize, self.omega.bins as isize);
        [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)]
            .into_iter()
            .map(move |(di, dj)| (i as isize + di, j as isize + dj))
            .filter(move |&(a, b)| a >= 0 && b >= 0 && a < ni && b < nj)
            .map(|(a, b)| (a as usize, b as usize))
    }

    pub fn sample_bin<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        let bins = self.unlocked_bins();
        bins[rng.random_range(0..bins.len())]
    }

    /// Scheduler step: when both tracking rewards in `bin` beat their
    /// thresholds the bin's success counter rises and its four neighbours
    /// unlock. Locked bins and failures leave the grid unchanged.
    pub fn update(&self, bin: (usize, usize), rewards: LinAng, thresholds: LinAng) -> Result<Self> {
        if bin.0 >= self.vx.bins || bin.1 >= self.omega.bins {
            return Err(Error::param(
                "bin",
                format!("{bin:?} outside grid {:?}", self.shape()),
            ));
        }
        let mut next = self.clone();
        if !self.is_unlocked(bin)
            || !(rewards.linear > thresholds.linear && rewards.angular > thresholds.angular)
        {
            return Ok(next);
        }
        let k = next.flat(bin);
        next.successes[k] = next.successes[k].saturating_add(1);
        for n in self.neighbours(bin) {
            let k = next.flat(n);
            next.unlocked[k] = true;
        }
        Ok(next)
    }
}

/// Noise-curriculum step for the intervention blend factor.
///
/// Rises by 0.01 when both tracking rewards beat their thresholds, falls by
/// 0.01 when either is below two thirds of its threshold, and is clamped to
/// `[0, 1]`.
pub fn update_noise_alpha(alpha: f64, rewards: LinAng, thresholds: LinAng) -> f64 {
    const STEP: f64 = 0.01;
    let up = rewards.linear > thresholds.linear && rewards.angular > thresholds.angular;
    let down = rewards.linear < thresholds.linear * 2.0 / 3.0
        || rewards.angular < thresholds.angular * 2.0 / 3.0;
    let next = if up {
        alpha + STEP
    } else if down {
        alpha - STEP
    } else {
        alpha
    };
    // Snap accumulated rounding at the bounds so 100 steps land exactly.
    if next >= 1.0 - 1e-9 {
        1.0
    } else if next <= 1e-9 {
        0.0
    } else {
        next
    }
}
