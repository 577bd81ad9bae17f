//! Plain-text (TOML) configuration. Every field is optional; a value set
//! here takes precedence over the matching command-line flag.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::command::RangeOverride;
use crate::error::{Error, Result};
use crate::learn::{LossCoefficients, NetSpec};
use crate::reward::{ContactRewardForm, RewardWeights};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClockSection {
    pub gait: Option<String>,
    pub f: Option<f64>,
    pub sigma: Option<f64>,
    pub dt: Option<f64>,
    pub cycles: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajSection {
    pub l: Option<f64>,
    pub start_z: Option<f64>,
    pub end_z: Option<f64>,
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSection {
    pub gait: Option<String>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    /// Per-channel range overrides keyed by channel name (`vx`, `f`, …).
    #[serde(default)]
    pub ranges: BTreeMap<String, RangeOverride>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardSection {
    pub contact_reward_form: Option<ContactRewardForm>,
    pub sigma: Option<f64>,
    pub weights: Option<RewardWeights>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterveneSection {
    pub steps: Option<u64>,
    pub p: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RolloutSection {
    pub gait: Option<String>,
    pub vx: Option<f64>,
    pub vy: Option<f64>,
    pub omega: Option<f64>,
    pub f: Option<f64>,
    pub l: Option<f64>,
    pub h: Option<f64>,
    pub p: Option<f64>,
    pub w: Option<f64>,
    pub steps: Option<usize>,
    pub lag: Option<f64>,
    pub seed: Option<u64>,
    pub p_flip: Option<f64>,
    pub alpha: Option<f64>,
    pub resample_every: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainToySection {
    pub epochs: Option<usize>,
    pub seed: Option<u64>,
    pub episodes_per_epoch: Option<usize>,
    pub learning_rate: Option<f64>,
    pub coefficients: Option<LossCoefficients>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Joint layout descriptor; the built-in 19-joint layout when unset.
    pub layout: Option<PathBuf>,
    #[serde(default)]
    pub clock: ClockSection,
    #[serde(default)]
    pub traj: TrajSection,
    #[serde(default)]
    pub sample_commands: SampleSection,
    #[serde(default)]
    pub reward: RewardSection,
    #[serde(default)]
    pub intervene: InterveneSection,
    #[serde(default)]
    pub rollout: RolloutSection,
    #[serde(default)]
    pub train_toy: TrainToySection,
    pub net: Option<NetSpec>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// The config value when present, else the flag.
pub fn pick<T>(config: Option<T>, flag: T) -> T {
    config.unwrap_or(flag)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections() {
        let c = Config::parse(
            r#"
            [rollout]
            vx = 0.5
            steps = 10

            [sample_commands.ranges.vx]
            initial = [-0.2, 0.2]

            [reward]
            contact_reward_form = "negated_exponent"

            [reward.weights]
            termination = -100.0

            [net]
            encoder = [8]
            latent = 2
            estimator = [4]
            low_level = [8]
            critic = [8]
            "#,
        )
        .unwrap();
        assert_eq!(c.rollout.vx, Some(0.5));
        assert_eq!(c.sample_commands.ranges["vx"].initial, Some([-0.2, 0.2]));
        assert_eq!(
            c.reward.contact_reward_form,
            Some(ContactRewardForm::NegatedExponent)
        );
        let w = c.reward.weights.unwrap();
        assert_eq!(w.termination, -100.0);
        assert_eq!(w.body_height_tracking, -40.0);
        assert_eq!(c.net.unwrap().latent, 2);
        assert_eq!(pick(c.rollout.steps, 1000), 10);
        assert_eq!(pick(c.rollout.seed, 7), 7);
    }

    #[test]
    fn unknown_keys_are_config_errors() {
        assert!(matches!(
            Config::parse("[rollout]\nspeed = 1"),
            Err(Error::Config(_))
        ));
        assert!(matches!(Config::parse("bogus = 1"), Err(Error::Config(_))));
    }
}
