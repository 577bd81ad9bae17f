//! Gait clock: per-leg phase variables, duty-cycle homogenization, clock
//! signals and the smoothed contact schedule.
//!
//! Leg index 0 is the left foot and index 1 the right foot. Every function
//! here is a pure function of its inputs.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default relaxation width of the contact switching interval.
pub const DEFAULT_SIGMA: f64 = 0.02;
/// Default control period (50 Hz).
pub const DEFAULT_DT: f64 = 0.02;
/// Duty cycle used by every preset.
pub const DEFAULT_DUTY_CYCLE: f64 = 0.5;

const STANDING_PHASE: f64 = 0.25;
const FLYING_PHASE: f64 = 0.75;
/// Largest double below 1.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Leg {
    Left,
    Right,
}

impl Leg {
    pub fn index(self) -> usize {
        match self {
            Leg::Left => 0,
            Leg::Right => 1,
        }
    }

    pub fn other(self) -> Leg {
        match self {
            Leg::Left => Leg::Right,
            Leg::Right => Leg::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaitKind {
    Walking,
    Jumping,
    Standing,
    Hopping,
}

/// A gait as a phase offset, a duty cycle and optionally frozen leg phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaitPreset {
    pub kind: GaitKind,
    /// Fraction of a cycle the right leg trails the left leg.
    pub phase_offset: f64,
    pub duty_cycle: f64,
    /// Per-leg constant phase; `None` means the leg's phase advances.
    pub fixed_phases: [Option<f64>; 2],
    /// Only meaningful for [`GaitKind::Hopping`].
    pub flying_leg: Leg,
}

impl GaitPreset {
    pub fn walking() -> Self {
        Self {
            kind: GaitKind::Walking,
            phase_offset: 0.5,
            duty_cycle: DEFAULT_DUTY_CYCLE,
            fixed_phases: [None, None],
            flying_leg: Leg::Left,
        }
    }

    pub fn jumping() -> Self {
        Self {
            kind: GaitKind::Jumping,
            phase_offset: 0.0,
            ..Self::walking()
        }
    }

    pub fn standing() -> Self {
        Self {
            kind: GaitKind::Standing,
            phase_offset: 0.0,
            fixed_phases: [Some(STANDING_PHASE), Some(STANDING_PHASE)],
            ..Self::walking()
        }
    }

    pub fn hopping(flying_leg: Leg) -> Self {
        let mut fixed_phases = [None, None];
        fixed_phases[flying_leg.index()] = Some(FLYING_PHASE);
        Self {
            kind: GaitKind::Hopping,
            phase_offset: 0.0,
            fixed_phases,
            flying_leg,
            ..Self::walking()
        }
    }

    pub fn from_kind(kind: GaitKind) -> Self {
        match kind {
            GaitKind::Walking => Self::walking(),
            GaitKind::Jumping => Self::jumping(),
            GaitKind::Standing => Self::standing(),
            GaitKind::Hopping => Self::hopping(Leg::Left),
        }
    }

    /// Phases a fresh episode starts from.
    pub fn initial_phases(&self) -> [f64; 2] {
        let mut phi = [0.0, wrap_unit(self.phase_offset)];
        for (p, fixed) in phi.iter_mut().zip(self.fixed_phases) {
            if let Some(v) = fixed {
                *p = v;
            }
        }
        phi
    }

    /// True when both legs advance and are locked together by the offset.
    pub fn is_coupled(&self) -> bool {
        self.fixed_phases.iter().all(Option::is_none)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.phase_offset) {
            return Err(Error::OutOfRange {
                name: "phase_offset",
                value: self.phase_offset,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if !(self.duty_cycle > 0.0 && self.duty_cycle < 1.0) {
            return Err(Error::param(
                "duty_cycle",
                format!("{} must lie strictly inside (0, 1)", self.duty_cycle),
            ));
        }
        for v in self.fixed_phases.iter().flatten() {
            if !(0.0..1.0).contains(v) {
                return Err(Error::OutOfRange {
                    name: "fixed_phase",
                    value: *v,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for GaitPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GaitKind::Walking => f.write_str("walking"),
            GaitKind::Jumping => f.write_str("jumping"),
            GaitKind::Standing => f.write_str("standing"),
            GaitKind::Hopping => match self.flying_leg {
                Leg::Left => f.write_str("hopping-left"),
                Leg::Right => f.write_str("hopping-right"),
            },
        }
    }
}

impl FromStr for GaitPreset {
    type Err = Error;

    /// Accepts `walking`, `jumping`, `standing`, `hopping`, `hopping-left`
    /// and `hopping-right`. Plain `hopping` flies the left leg.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "walking" | "walk" => Ok(Self::walking()),
            "jumping" | "jump" => Ok(Self::jumping()),
            "standing" | "stand" => Ok(Self::standing()),
            "hopping" | "hopping-left" | "hop" => Ok(Self::hopping(Leg::Left)),
            "hopping-right" => Ok(Self::hopping(Leg::Right)),
            other => Err(Error::Config(format!("unknown gait `{other}`"))),
        }
    }
}

/// Phase variables of both legs plus the clock parameters driving them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub phi: [f64; 2],
    pub frequency: f64,
    pub dt: f64,
    pub preset: GaitPreset,
}

impl PhaseState {
    pub fn new(preset: GaitPreset, frequency: f64, dt: f64) -> Result<Self> {
        let state = Self {
            phi: preset.initial_phases(),
            frequency,
            dt,
            preset,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn with_phases(mut self, phi: [f64; 2]) -> Result<Self> {
        self.phi = phi;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check_frequency(self.frequency)?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param(
                "dt",
                format!("{} must be finite and > 0", self.dt),
            ));
        }
        self.preset.validate()?;
        for p in self.phi {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::OutOfRange {
                    name: "phi",
                    value: p,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
        Ok(())
    }

    /// One control step of the phase clock.
    pub fn advance(&self) -> Result<PhaseState> {
        advance_phase(self)
    }

    pub fn homogenized(&self) -> Result<[f64; 2]> {
        Ok([
            homogenize_phase(self.phi[0], self.preset.duty_cycle)?,
            homogenize_phase(self.phi[1], self.preset.duty_cycle)?,
        ])
    }
}

fn check_frequency(f: f64) -> Result<()> {
    if f.is_finite() && f > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidFrequency(f))
    }
}

/// `x mod 1` mapped into `[0, 1)`, including the rounding case that lands on 1.
pub fn wrap_unit(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Advances the left leg by `f·dt` and places the right leg `ψ` behind it.
/// Frozen legs keep their phase; for hopping only the stance leg advances.
pub fn advance_phase(state: &PhaseState) -> Result<PhaseState> {
    check_frequency(state.frequency)?;
    let step = state.frequency * state.dt;
    let preset = &state.preset;
    let mut phi = state.phi;

    match preset.fixed_phases {
        [None, None] => {
            phi[0] = wrap_unit(phi[0] + step);
            phi[1] = wrap_unit(phi[0] + preset.phase_offset);
        }
        [fixed_l, fixed_r] => {
            for (i, fixed) in [fixed_l, fixed_r].into_iter().enumerate() {
                phi[i] = match fixed {
                    Some(v) => v,
                    None => wrap_unit(phi[i] + step),
                };
            }
        }
    }

    Ok(PhaseState { phi, ..*state })
}

/// Maps stance onto `[0, 0.5)` and swing onto `[0.5, 1)`.
pub fn homogenize_phase(phi: f64, duty_cycle: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&phi) {
        return Err(Error::OutOfRange {
            name: "phi",
            value: phi,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if !(duty_cycle > 0.0 && duty_cycle < 1.0) {
        return Err(Error::param(
            "duty_cycle",
            format!("{duty_cycle} must lie strictly inside (0, 1)"),
        ));
    }
    let bar = if phi < duty_cycle {
        0.5 * phi / duty_cycle
    } else {
        0.5 + 0.5 * (phi - duty_cycle) / (1.0 - duty_cycle)
    };
    Ok(bar.min(BELOW_ONE))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactModelParams {
    sigma: f64,
}

impl ContactModelParams {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0 && sigma <= 0.1) {
            return Err(Error::param(
                "sigma",
                format!("{sigma} must lie in (0, 0.1]"),
            ));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

impl Default for ContactModelParams {
    fn default() -> Self {
        Self {
            sigma: DEFAULT_SIGMA,
        }
    }
}

/// Standard normal CDF through `erfc`, accurate in both tails.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Expected probability that a foot at homogenized phase `phi_bar` is in
/// contact: close to 1 on `(0, 0.5)`, close to 0 on `(0.5, 1)`, with
/// Gaussian-smoothed transitions of width `sigma`.
pub fn contact_probability(phi_bar: f64, params: &ContactModelParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&phi_bar) {
        return Err(Error::OutOfRange {
            name: "phi_bar",
            value: phi_bar,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let s = params.sigma;
    let first = normal_cdf(phi_bar / s) * (1.0 - normal_cdf((phi_bar - 0.5) / s));
    let second = normal_cdf((phi_bar - 1.0) / s) * (1.0 - normal_cdf((phi_bar - 1.5) / s));
    Ok((first + second).clamp(0.0, 1.0))
}

pub fn contact_probabilities(state: &PhaseState, params: &ContactModelParams) -> Result<[f64; 2]> {
    let bar = state.homogenized()?;
    Ok([
        contact_probability(bar[0], params)?,
        contact_probability(bar[1], params)?,
    ])
}

/// `sin(2π φ̄)` for a single homogenized phase.
pub fn clock_signal(phi_bar: f64) -> f64 {
    (2.0 * PI * phi_bar).sin()
}

/// Left and right clock channels of a phase state.
pub fn clock_values(state: &PhaseState) -> Result<(f64, f64)> {
    let bar = state.homogenized()?;
    Ok((clock_signal(bar[0]), clock_signal(bar[1])))
}

/// One row of a sampled gait clock trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClockSample {
    pub t: f64,
    pub phi: [f64; 2],
    pub phi_bar: [f64; 2],
    pub clock: [f64; 2],
    pub contact: [f64; 2],
}

/// Samples `cycles` full gait cycles starting from the preset's initial phases.
pub fn clock_trace(
    preset: GaitPreset,
    frequency: f64,
    dt: f64,
    params: &ContactModelParams,
    cycles: f64,
) -> Result<Vec<ClockSample>> {
    if !(cycles.is_finite() && cycles >= 0.0) {
        return Err(Error::param(
            "cycles",
            format!("{cycles} must be finite and >= 0"),
        ));
    }
    let mut state = PhaseState::new(preset, frequency, dt)?;
    let steps = (cycles / (frequency * dt)).round() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let phi_bar = state.homogenized()?;
        let (cl, cr) = clock_values(&state)?;
        out.push(ClockSample {
            t: k as f64 * dt,
            phi: state.phi,
            phi_bar,
            clock: [cl, cr],
            contact: [
                contact_probability(phi_bar[0], params)?,
                contact_probability(phi_bar[1], params)?,
            ],
        });
        state = state.advance()?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn state(preset: GaitPreset, phi: [f64; 2], f: f64) -> PhaseState {
        PhaseState::new(preset, f, 0.02)
            .unwrap()
            .with_phases(phi)
            .unwrap()
    }

    #[test]
    fn walking_wraps_and_keeps_offset() {
        let next = state(GaitPreset::walking(), [0.98, 0.48], 2.0)
            .advance()
            .unwrap();
        assert_abs_diff_eq!(next.phi[0], 0.02, epsilon = 1e-12);
        assert_abs_diff_eq!(next.phi[1], 0.52, epsilon = 1e-12);
    }

    #[test]
    fn standing_is_frozen() {
        for f in [0.5, 2.0, 3.5] {
            let next = state(GaitPreset::standing(), [0.25, 0.25], f)
                .advance()
                .unwrap();
            assert_eq!(next.phi, [0.25, 0.25]);
        }
    }

    #[test]
    fn hopping_advances_only_stance_leg() {
        let next = state(GaitPreset::hopping(Leg::Right), [0.10, 0.75], 2.5)
            .advance()
            .unwrap();
        assert_abs_diff_eq!(next.phi[0], 0.15, epsilon = 1e-12);
        assert_eq!(next.phi[1], 0.75);

        let next = state(GaitPreset::hopping(Leg::Left), [0.75, 0.10], 2.5)
            .advance()
            .unwrap();
        assert_eq!(next.phi[0], 0.75);
        assert_abs_diff_eq!(next.phi[1], 0.15, epsilon = 1e-12);
    }

    #[test]
    fn invalid_frequency_rejected() {
        let mut s = state(GaitPreset::walking(), [0.0, 0.5], 2.0);
        for f in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            s.frequency = f;
            assert!(matches!(advance_phase(&s), Err(Error::InvalidFrequency(_))));
        }
    }

    #[test]
    fn homogenize_examples() {
        assert_abs_diff_eq!(homogenize_phase(0.25, 0.5).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(homogenize_phase(0.2, 0.4).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(homogenize_phase(0.7, 0.4).unwrap(), 0.75, epsilon = 1e-15);
        assert!(homogenize_phase(0.3, 0.0).is_err());
        assert!(homogenize_phase(0.3, 1.0).is_err());
        assert!(homogenize_phase(1.0, 0.5).is_err());
    }

    #[test]
    fn contact_probability_examples() {
        let p = ContactModelParams::default();
        assert!(contact_probability(0.25, &p).unwrap() > 0.999);
        assert_abs_diff_eq!(contact_probability(0.5, &p).unwrap(), 0.5, epsilon = 1e-6);
        assert!(contact_probability(0.75, &p).unwrap() < 0.001);
        assert!(contact_probability(1.2, &p).is_err());
    }

    #[test]
    fn sigma_bounds() {
        assert!(ContactModelParams::new(0.0).is_err());
        assert!(ContactModelParams::new(0.11).is_err());
        assert!(ContactModelParams::new(0.1).is_ok());
    }

    #[test]
    fn normal_cdf_reference_values() {
        // Reference values from high-precision tables.
        assert_abs_diff_eq!(normal_cdf(0.0), 0.5, epsilon = 1e-16);
        assert_abs_diff_eq!(normal_cdf(1.0), 0.841_344_746_068_542_9, epsilon = 1e-15);
        assert_abs_diff_eq!(normal_cdf(-1.96), 0.024_997_895_148_220_43, epsilon = 1e-15);
        let tail = normal_cdf(-10.0);
        assert!((tail - 7.619_853_024_160_527e-24).abs() / 7.619_853_024_160_527e-24 < 1e-12);
    }

    #[test]
    fn clock_examples() {
        assert_abs_diff_eq!(clock_signal(0.25), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(clock_signal(0.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(clock_signal(0.3), 0.951_056_516_295_153_5, epsilon = 1e-12);
        let s = PhaseState::new(GaitPreset::standing(), 2.0, 0.02).unwrap();
        assert_eq!(clock_values(&s).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn preset_parsing_round_trips() {
        for name in [
            "walking",
            "jumping",
            "standing",
            "hopping-left",
            "hopping-right",
        ] {
            let p: GaitPreset = name.parse().unwrap();
            assert_eq!(p.to_string(), name);
        }
        assert!("galloping".parse::<GaitPreset>().is_err());
    }

    #[test]
    fn trace_covers_requested_cycles() {
        let trace =
            clock_trace(GaitPreset::walking(), 2.0, 0.02, &Default::default(), 2.0).unwrap();
        assert_eq!(trace.len(), 51);
        assert_abs_diff_eq!(trace.last().unwrap().t, 1.0, epsilon = 1e-12);
    }
}
