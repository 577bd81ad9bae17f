//! Upper-body intervention: the random on/off indicator, interpolated
//! uniform noise targets, policy blending and dataset playback.

use std::collections::BTreeMap;
use std::io::BufRead;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::layout::JointLayout;

pub const DEFAULT_P_FLIP: f64 = 0.005;
pub const DEFAULT_T_INTERVAL: u64 = 90;

/// Axis-aligned box the noise targets are drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl NoiseBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim("noise box", lower.len(), upper.len())?;
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::param(
                    "noise box",
                    format!("bad bounds at {i}: [{lo}, {hi}]"),
                ));
            }
        }
        Ok(Self { lower, upper })
    }

    /// Upper-body joint limits shrunk by `margin` (fraction of each range)
    /// on both sides.
    pub fn from_layout(layout: &JointLayout, margin: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&margin) {
            return Err(Error::OutOfRange {
                name: "margin",
                value: margin,
                lo: 0.0,
                hi: 0.5,
            });
        }
        let (lower, upper) = layout
            .limits(&layout.upper_indices())
            .into_iter()
            .map(|(lo, hi)| {
                let m = margin * (hi - lo);
                (lo + m, hi - m)
            })
            .unzip();
        Self::new(lower, upper)
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn contains(&self, a: &[f64]) -> bool {
        a.len() == self.len()
            && a.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (lo, hi))| lo <= x && x <= hi)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| {
                if lo < hi {
                    rng.random_range(lo..=hi)
                } else {
                    lo
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterventionState {
    /// `I(t)`: whether the external signal owns the upper body.
    pub active: bool,
    /// Step index at which the current noise target was drawn.
    pub t0: u64,
    pub a_init: Vec<f64>,
    pub a_target: Vec<f64>,
    pub alpha: f64,
    pub p_flip: f64,
    pub t_interval: u64,
}

impl InterventionState {
    /// Inactive state holding `pose` as both endpoints.
    pub fn new(pose: Vec<f64>) -> Self {
        Self {
            active: false,
            t0: 0,
            a_init: pose.clone(),
            a_target: pose,
            alpha: 0.0,
            p_flip: DEFAULT_P_FLIP,
            t_interval: DEFAULT_T_INTERVAL,
        }
    }

    /// `p_flip` may be 0 or 1 so the degenerate schedules stay expressible.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_flip) {
            return Err(Error::OutOfRange {
                name: "p_flip",
                value: self.p_flip,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: self.alpha,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if self.t_interval == 0 {
            return Err(Error::param("t_interval", "must be >= 1"));
        }
        check_dim("a_target", self.a_init.len(), self.a_target.len())
    }
}

/// Reverses the indicator with probability `p_flip`.
pub fn step_indicator<R: Rng + ?Sized>(
    state: &InterventionState,
    rng: &mut R,
) -> InterventionState {
    let mut next = state.clone();
    if rng.random::<f64>() < state.p_flip {
        next.active = !next.active;
    }
    next
}

/// Interpolation fraction `min(1, 1.5·(t − t0)/t_interval)`.
pub fn interpolation_ratio(t: u64, t0: u64, t_interval: u64) -> f64 {
    let elapsed = t.saturating_sub(t0) as f64;
    (1.5 * elapsed / t_interval as f64).min(1.0)
}

pub fn noise_interpolate(state: &InterventionState, t: u64) -> Vec<f64> {
    let r = interpolation_ratio(t, state.t0, state.t_interval);
    state
        .a_init
        .iter()
        .zip(&state.a_target)
        .map(|(a, b)| (1.0 - r) * a + r * b)
        .collect()
}

/// Emits the noise action for step `t`, first drawing a fresh target when
/// the current interval has elapsed. The new interval starts from the
/// action emitted on the previous step, so the output is continuous.
pub fn advance_noise<R: Rng + ?Sized>(
    state: &InterventionState,
    t: u64,
    bounds: &NoiseBox,
    rng: &mut R,
) -> Result<(InterventionState, Vec<f64>)> {
    check_dim("noise box", state.a_init.len(), bounds.len())?;
    let mut next = state.clone();
    if t >= state.t0 + state.t_interval {
        next.a_init = noise_interpolate(state, t.saturating_sub(1));
        next.a_target = bounds.sample(rng);
        next.t0 = t;
    }
    let out = noise_interpolate(&next, t);
    Ok((next, out))
}

/// `α·a_noise + (1 − α)·a_policy`.
pub fn blend_with_policy(a_policy: &[f64], a_noise: &[f64], alpha: f64) -> Result<Vec<f64>> {
    check_dim("noise action", a_policy.len(), a_noise.len())?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(a_policy
        .iter()
        .zip(a_noise)
        .map(|(p, n)| alpha * n + (1.0 - alpha) * p)
        .collect())
}

/// A recorded upper-body motion played back at its native frame rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetTrajectory {
    frames: Vec<Vec<f64>>,
    /// Frame times in frame-clock units, `f · seconds`.
    stamps: Vec<f64>,
    frequency: f64,
}

#[derive(Debug, Deserialize)]
struct DatasetLine {
    t: f64,
    q: Vec<f64>,
}

impl DatasetTrajectory {
    /// `times` are in seconds and must be strictly increasing.
    pub fn new(frames: Vec<Vec<f64>>, times: Vec<f64>, frequency: f64) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::Empty("dataset trajectory"));
        }
        check_dim("dataset timestamps", frames.len(), times.len())?;
        if !(frequency.is_finite() && frequency > 0.0) {
            return Err(Error::InvalidFrequency(frequency));
        }
        let dim = frames[0].len();
        for f in &frames {
            check_dim("dataset frame", dim, f.len())?;
        }
        if times.windows(2).any(|w| w[1] <= w[0]) || times.iter().any(|t| !t.is_finite()) {
            return Err(Error::param(
                "timestamps",
                "must be finite and strictly increasing",
            ));
        }
        Ok(Self {
            stamps: times.iter().map(|t| frequency * t).collect(),
            frames,
            frequency,
        })
    }

    /// Frames `k` at times `k / frequency`.
    pub fn uniform(frames: Vec<Vec<f64>>, frequency: f64) -> Result<Self> {
        let times = (0..frames.len()).map(|k| k as f64 / frequency).collect();
        Self::new(frames, times, frequency)
    }

    /// One JSON object per line: `{"t": seconds, "q": [joint values]}`.
    pub fn read_jsonl(reader: impl BufRead, frequency: f64) -> Result<Self> {
        let mut frames = Vec::new();
        let mut times = Vec::new();
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: DatasetLine = serde_json::from_str(&line)?;
            times.push(rec.t);
            frames.push(rec.q);
        }
        Self::new(frames, times, frequency)
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Time span in seconds.
    pub fn span(&self) -> (f64, f64) {
        (
            self.stamps[0] / self.frequency,
            self.stamps[self.stamps.len() - 1] / self.frequency,
        )
    }
}

/// Linear blend of the frames bracketing `f · t`, `t` in seconds.
pub fn dataset_interpolate(traj: &DatasetTrajectory, t: f64) -> Result<Vec<f64>> {
    let x = traj.frequency * t;
    let (first, last) = (traj.stamps[0], traj.stamps[traj.stamps.len() - 1]);
    if !(first..=last).contains(&x) {
        let (lo, hi) = traj.span();
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            lo,
            hi,
        });
    }
    if x == last {
        return Ok(traj.frames[traj.frames.len() - 1].clone());
    }
    let k = traj.stamps.partition_point(|&s| s <= x) - 1;
    let (tk, tk1) = (traj.stamps[k], traj.stamps[k + 1]);
    let gamma = (x - tk) / (tk1 - tk);
    Ok(traj.frames[k]
        .iter()
        .zip(&traj.frames[k + 1])
        .map(|(a, b)| (1.0 - gamma) * a + gamma * b)
        .collect())
}

/// Lengths of the runs of non-flipping steps between consecutive flips.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLengthStats {
    pub histogram: BTreeMap<u64, u64>,
    pub runs: u64,
    pub mean: f64,
    pub variance: f64,
}

pub fn run_length_stats<R: Rng + ?Sized>(
    steps: u64,
    p_flip: f64,
    rng: &mut R,
) -> Result<RunLengthStats> {
    let mut state = InterventionState::new(Vec::new());
    state.p_flip = p_flip;
    state.validate()?;
    let mut histogram = BTreeMap::new();
    let mut current = 0u64;
    for _ in 0..steps {
        let next = step_indicator(&state, rng);
        if next.active != state.active {
            *histogram.entry(current).or_insert(0) += 1;
            current = 0;
        } else {
            current += 1;
        }
        state = next;
    }
    let runs: u64 = histogram.values().sum();
    if runs == 0 {
        return Err(Error::Empty("indicator flips"));
    }
    let n = runs as f64;
    let mean = histogram
        .iter()
        .map(|(&l, &c)| l as f64 * c as f64)
        .sum::<f64>()
        / n;
    let variance = histogram
        .iter()
        .map(|(&l, &c)| c as f64 * (l as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    Ok(RunLengthStats {
        histogram,
        runs,
        mean,
        variance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degenerate_flip_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut s = InterventionState::new(vec![0.0]);
        s.p_flip = 0.0;
        for _ in 0..100 {
            s = step_indicator(&s, &mut rng);
            assert!(!s.active);
        }
        s.p_flip = 1.0;
        for k in 0..100 {
            s = step_indicator(&s, &mut rng);
            assert_eq!(s.active, k % 2 == 0);
        }
    }

    #[test]
    fn interpolation_examples() {
        let mut s = InterventionState::new(vec![0.0, 1.0]);
        s.a_target = vec![1.0, 3.0];
        s.t0 = 10;
        assert_eq!(noise_interpolate(&s, 10), vec![0.0, 1.0]);
        assert_eq!(noise_interpolate(&s, 40), vec![0.5, 2.0]);
        assert_eq!(noise_interpolate(&s, 70), vec![1.0, 3.0]);
        assert_eq!(noise_interpolate(&s, 99), vec![1.0, 3.0]);
        assert_eq!(interpolation_ratio(60, 0, 90), 1.0);
        assert!(interpolation_ratio(59, 0, 90) < 1.0);
    }

    #[test]
    fn resample_is_continuous() {
        let layout = JointLayout::h1();
        let bounds = NoiseBox::from_layout(&layout, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut s = InterventionState::new(vec![0.0; 8]);
        s.a_target = bounds.sample(&mut rng);
        let mut prev = noise_interpolate(&s, 0);
        for t in 1..400 {
            let (next, out) = advance_noise(&s, t, &bounds, &mut rng).unwrap();
            let jump = out
                .iter()
                .zip(&prev)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            // one step moves at most 1.5/90 of the widest joint range
            assert!(jump <= 1.5 / 90.0 * 5.75 + 1e-12, "t={t} jump={jump}");
            assert!(t < 90 || bounds.contains(&next.a_target));
            prev = out;
            s = next;
        }
    }

    #[test]
    fn blend_examples() {
        assert_eq!(blend_with_policy(&[0.2], &[0.6], 0.0).unwrap(), vec![0.2]);
        assert_eq!(blend_with_policy(&[0.2], &[0.6], 1.0).unwrap(), vec![0.6]);
        assert!((blend_with_policy(&[0.2], &[0.6], 0.5).unwrap()[0] - 0.4).abs() < 1e-15);
        assert!(blend_with_policy(&[0.2], &[0.6], 1.5).is_err());
    }

    #[test]
    fn dataset_examples() {
        let traj = DatasetTrajectory::uniform(vec![vec![0.0], vec![1.0], vec![3.0]], 30.0).unwrap();
        assert_eq!(dataset_interpolate(&traj, 1.0 / 30.0).unwrap(), vec![1.0]);
        assert_eq!(dataset_interpolate(&traj, 2.0 / 30.0).unwrap(), vec![3.0]);
        let mid = dataset_interpolate(&traj, 1.5 / 30.0).unwrap()[0];
        assert!((mid - 2.0).abs() < 1e-12);
        assert!(dataset_interpolate(&traj, 0.1).is_err());
        assert!(dataset_interpolate(&traj, -0.01).is_err());

        let single = DatasetTrajectory::uniform(vec![vec![0.7, 0.1]], 30.0).unwrap();
        assert_eq!(dataset_interpolate(&single, 0.0).unwrap(), vec![0.7, 0.1]);
    }

    #[test]
    fn dataset_jsonl_roundtrip() {
        let text = "{\"t\":0.0,\"q\":[0,0]}\n{\"t\":0.5,\"q\":[1,2]}\n";
        let traj = DatasetTrajectory::read_jsonl(text.as_bytes(), 2.0).unwrap();
        assert_eq!(traj.len(), 2);
        assert_eq!(dataset_interpolate(&traj, 0.25).unwrap(), vec![0.5, 1.0]);
        let bad = "{\"t\":0.5,\"q\":[0]}\n{\"t\":0.5,\"q\":[1]}\n";
        assert!(DatasetTrajectory::read_jsonl(bad.as_bytes(), 2.0).is_err());
    }
}
