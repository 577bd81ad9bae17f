//! Sagittal (X-Z plane) mirror maps over actions and actor observations,
//! and the symmetry loss built on them.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::layout::JointLayout;
use crate::obs::{ActorLayout, COMMAND_OFFSETS};

/// `out[i] = sign[i] · x[perm[i]]`, restricted to involutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    sign: Vec<f64>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, sign: Vec<f64>) -> Result<Self> {
        check_dim("mirror sign vector", perm.len(), sign.len())?;
        let n = perm.len();
        for (i, (&p, &s)) in perm.iter().zip(&sign).enumerate() {
            if p >= n {
                return Err(Error::param("perm", format!("index {p} out of range {n}")));
            }
            if s != 1.0 && s != -1.0 {
                return Err(Error::param("sign", format!("entry {i} is {s}, not ±1")));
            }
            if perm[p] != i || sign[p] != s {
                return Err(Error::param(
                    "perm",
                    format!("entry {i} does not form an involution"),
                ));
            }
        }
        Ok(Self { perm, sign })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            sign: vec![1.0; n],
        }
    }

    /// Diagonal sign flip without permutation.
    pub fn signs(sign: Vec<f64>) -> Result<Self> {
        Self::new((0..sign.len()).collect(), sign)
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn sign_vector(&self) -> &[f64] {
        &self.sign
    }

    /// Block-diagonal concatenation.
    pub fn concat(parts: &[&SignedPermutation]) -> Self {
        let mut perm = Vec::new();
        let mut sign = Vec::new();
        for p in parts {
            let off = perm.len();
            perm.extend(p.perm.iter().map(|i| i + off));
            sign.extend_from_slice(&p.sign);
        }
        Self { perm, sign }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim("mirrored vector", self.len(), x.len())?;
        Ok(self
            .perm
            .iter()
            .zip(&self.sign)
            .map(|(&p, &s)| s * x[p])
            .collect())
    }

    /// Dense matrix form (row-major), for building linear test policies.
    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut row = vec![0.0; n];
                row[self.perm[i]] = self.sign[i];
                row
            })
            .collect()
    }
}

/// Action and actor-observation mirror maps for one joint layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MirrorMap {
    action: SignedPermutation,
    observation: SignedPermutation,
    layout: ActorLayout,
}

impl MirrorMap {
    /// Builds both maps. Within each proprioceptive frame the base angular
    /// velocity flips roll and yaw rate, gravity flips its lateral component,
    /// and the joint blocks mirror like the action. Commands negate `vy`,
    /// `ω` and waist yaw and swap the two clock channels. The intervention
    /// indicator maps to itself.
    pub fn new(joints: &JointLayout, history: usize) -> Result<Self> {
        let layout = ActorLayout::new(joints.len(), history)?;
        let action = joints.mirror_permutation();

        let ang_vel = SignedPermutation::signs(vec![-1.0, 1.0, -1.0])?;
        let gravity = SignedPermutation::signs(vec![1.0, -1.0, 1.0])?;
        let frame = SignedPermutation::concat(&[&ang_vel, &gravity, &action, &action, &action]);

        let mut cmd_perm: Vec<usize> = (0..crate::command::COMMAND_DIM).collect();
        let mut cmd_sign = vec![1.0; crate::command::COMMAND_DIM];
        for i in [
            COMMAND_OFFSETS.vy,
            COMMAND_OFFSETS.omega,
            COMMAND_OFFSETS.waist_yaw,
        ] {
            cmd_sign[i] = -1.0;
        }
        cmd_perm.swap(COMMAND_OFFSETS.clock_left, COMMAND_OFFSETS.clock_right);
        let commands = SignedPermutation::new(cmd_perm, cmd_sign)?;
        let indicator = SignedPermutation::identity(1);

        let mut parts: Vec<&SignedPermutation> = vec![&frame; history];
        parts.push(&commands);
        parts.push(&indicator);
        let observation = SignedPermutation::concat(&parts);
        debug_assert_eq!(observation.len(), layout.total());

        Ok(Self {
            action,
            observation,
            layout,
        })
    }

    pub fn h1() -> Self {
        Self::new(&JointLayout::h1(), crate::obs::HISTORY_LEN).expect("built-in layout")
    }

    pub fn action_map(&self) -> &SignedPermutation {
        &self.action
    }

    pub fn observation_map(&self) -> &SignedPermutation {
        &self.observation
    }

    pub fn layout(&self) -> &ActorLayout {
        &self.layout
    }
}

pub fn mirror_action(action: &[f64], map: &MirrorMap) -> Result<Vec<f64>> {
    map.action.apply(action)
}

pub fn mirror_observation(observation: &[f64], map: &MirrorMap) -> Result<Vec<f64>> {
    map.observation.apply(observation)
}

/// `Σ ‖π(o) − F_a(π(F_o(o)))‖²` over the batch, using the policy's
/// deterministic (mean) action.
pub fn symmetry_loss<P>(policy: P, batch: &[Vec<f64>], map: &MirrorMap) -> Result<f64>
where
    P: Fn(&[f64]) -> Vec<f64>,
{
    symmetry_loss_with(policy, batch, &map.observation, &map.action)
}

/// [`symmetry_loss`] over arbitrary observation/action mirror maps.
pub fn symmetry_loss_with<P>(
    policy: P,
    batch: &[Vec<f64>],
    obs_map: &SignedPermutation,
    action_map: &SignedPermutation,
) -> Result<f64>
where
    P: Fn(&[f64]) -> Vec<f64>,
{
    let mut total = 0.0;
    for o in batch {
        let a = policy(o);
        let mirrored = action_map.apply(&policy(&obs_map.apply(o)?))?;
        check_dim("policy output", a.len(), mirrored.len())?;
        total += a
            .iter()
            .zip(&mirrored)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::NUM_JOINTS;

    #[test]
    fn rejects_non_involutions() {
        assert!(SignedPermutation::new(vec![1, 2, 0], vec![1.0; 3]).is_err());
        assert!(SignedPermutation::new(vec![1, 0], vec![1.0, -1.0]).is_err());
        assert!(SignedPermutation::new(vec![0], vec![0.5]).is_err());
        assert!(SignedPermutation::new(vec![1, 0], vec![-1.0, -1.0]).is_ok());
    }

    #[test]
    fn knee_maps_to_knee() {
        let map = MirrorMap::h1();
        let l = JointLayout::h1();
        let mut a = vec![0.0; NUM_JOINTS];
        a[l.index_of("left_knee").unwrap()] = 0.7;
        let m = mirror_action(&a, &map).unwrap();
        let mut expected = vec![0.0; NUM_JOINTS];
        expected[l.index_of("right_knee").unwrap()] = 0.7;
        assert_eq!(m, expected);
    }

    #[test]
    fn hip_roll_flips_sign() {
        let map = MirrorMap::h1();
        let l = JointLayout::h1();
        let mut a = vec![0.0; NUM_JOINTS];
        a[l.index_of("left_hip_roll").unwrap()] = 0.2;
        let m = mirror_action(&a, &map).unwrap();
        assert_eq!(m[l.index_of("right_hip_roll").unwrap()], -0.2);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let map = MirrorMap::h1();
        assert!(mirror_action(&[0.0; 18], &map).is_err());
        assert!(mirror_observation(&[0.0; 10], &map).is_err());
    }

    #[test]
    fn zero_maps_to_zero() {
        let map = MirrorMap::h1();
        assert_eq!(
            mirror_action(&[0.0; NUM_JOINTS], &map).unwrap(),
            vec![0.0; NUM_JOINTS]
        );
    }
}
