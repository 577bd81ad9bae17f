//! Joint layout descriptors.
//!
//! A layout is an ordered list of joints with their sagittal mirror partner,
//! mirror sign, position limits, nominal pose and role tags. The plain-text
//! descriptor format is one joint per line:
//!
//! ```text
//! name  mirror_partner  mirror_sign  lower  upper  nominal  tags
//! ```
//!
//! `#` starts a comment; `tags` is a comma-separated list or `-`.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mirror::SignedPermutation;

/// Number of actuated joints of the reference humanoid.
pub const NUM_JOINTS: usize = 19;
/// Number of externally controllable upper-body (arm) joints.
pub const NUM_UPPER: usize = 8;

const H1_LAYOUT: &str = include_str!("../layouts/h1.layout");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointTag {
    /// Arm joints that an external controller may take over.
    Upper,
    /// Hip roll and yaw joints.
    HipXz,
    Waist,
}

impl JointTag {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "upper" => Some(JointTag::Upper),
            "hip_xz" => Some(JointTag::HipXz),
            "waist" => Some(JointTag::Waist),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointSpec {
    pub name: String,
    pub partner: usize,
    pub sign: f64,
    pub lower: f64,
    pub upper: f64,
    pub nominal: f64,
    pub tags: Vec<JointTag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointLayout {
    joints: Vec<JointSpec>,
}

impl JointLayout {
    /// The built-in 19-joint humanoid layout.
    pub fn h1() -> Self {
        Self::parse(H1_LAYOUT).expect("built-in layout is valid")
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        struct Row<'a> {
            line: usize,
            name: &'a str,
            partner: &'a str,
            sign: f64,
            lower: f64,
            upper: f64,
            nominal: f64,
            tags: Vec<JointTag>,
        }

        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let cols: Vec<&str> = content.split_whitespace().collect();
            if cols.len() != 7 {
                return Err(Error::Layout {
                    line,
                    reason: format!("expected 7 columns, found {}", cols.len()),
                });
            }
            let num = |s: &str, what: &str| -> Result<f64> {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Layout {
                        line,
                        reason: format!("bad {what} `{s}`"),
                    })
            };
            let sign = num(cols[2], "sign")?;
            if sign != 1.0 && sign != -1.0 {
                return Err(Error::Layout {
                    line,
                    reason: format!("mirror sign must be +1 or -1, got {}", cols[2]),
                });
            }
            let tags = if cols[6] == "-" {
                Vec::new()
            } else {
                cols[6]
                    .split(',')
                    .map(|t| {
                        JointTag::parse(t).ok_or_else(|| Error::Layout {
                            line,
                            reason: format!("unknown tag `{t}`"),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            rows.push(Row {
                line,
                name: cols[0],
                partner: cols[1],
                sign,
                lower: num(cols[3], "lower limit")?,
                upper: num(cols[4], "upper limit")?,
                nominal: num(cols[5], "nominal")?,
                tags,
            });
        }

        if rows.is_empty() {
            return Err(Error::Empty("joint layout"));
        }
        let mut index = BTreeMap::new();
        for (i, r) in rows.iter().enumerate() {
            if index.insert(r.name, i).is_some() {
                return Err(Error::Layout {
                    line: r.line,
                    reason: format!("duplicate joint `{}`", r.name),
                });
            }
        }

        let mut joints = Vec::with_capacity(rows.len());
        for r in &rows {
            let partner = *index.get(r.partner).ok_or_else(|| Error::Layout {
                line: r.line,
                reason: format!("unknown mirror partner `{}`", r.partner),
            })?;
            if r.lower >= r.upper || r.nominal < r.lower || r.nominal > r.upper {
                return Err(Error::Layout {
                    line: r.line,
                    reason: "limits must satisfy lower < upper and contain the nominal".into(),
                });
            }
            joints.push(JointSpec {
                name: r.name.to_string(),
                partner,
                sign: r.sign,
                lower: r.lower,
                upper: r.upper,
                nominal: r.nominal,
                tags: r.tags.clone(),
            });
        }

        // Mirror consistency: partners point at each other, share sign and
        // tags, and their limits and nominal pose reflect into each other.
        for (i, (j, r)) in joints.iter().zip(&rows).enumerate() {
            let p = &joints[j.partner];
            let bad = |reason: &str| Error::Layout {
                line: r.line,
                reason: format!("`{}`: {reason}", j.name),
            };
            if p.partner != i {
                return Err(bad("mirror partner does not map back"));
            }
            if p.sign != j.sign {
                return Err(bad("mirror sign differs from partner"));
            }
            if p.tags != j.tags {
                return Err(bad("tags differ from partner"));
            }
            let (lo, hi) = if j.sign > 0.0 {
                (j.lower, j.upper)
            } else {
                (-j.upper, -j.lower)
            };
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
            if !close(p.lower, lo) || !close(p.upper, hi) || !close(p.nominal, j.sign * j.nominal) {
                return Err(bad(
                    "limits or nominal pose are not mirror images of the partner",
                ));
            }
        }

        Ok(Self { joints })
    }

    pub fn len(&self) -> usize {
        self.joints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.joints.is_empty()
    }

    pub fn joints(&self) -> &[JointSpec] {
        &self.joints
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.joints.iter().position(|j| j.name == name)
    }

    pub fn indices_with(&self, tag: JointTag) -> Vec<usize> {
        self.joints
            .iter()
            .enumerate()
            .filter(|(_, j)| j.tags.contains(&tag))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn upper_indices(&self) -> Vec<usize> {
        self.indices_with(JointTag::Upper)
    }

    pub fn hip_xz_indices(&self) -> Vec<usize> {
        self.indices_with(JointTag::HipXz)
    }

    pub fn waist_index(&self) -> Option<usize> {
        self.indices_with(JointTag::Waist).first().copied()
    }

    pub fn nominal_pose(&self) -> Vec<f64> {
        self.joints.iter().map(|j| j.nominal).collect()
    }

    pub fn limits(&self, indices: &[usize]) -> Vec<(f64, f64)> {
        indices
            .iter()
            .map(|&i| (self.joints[i].lower, self.joints[i].upper))
            .collect()
    }

    /// Signed permutation reflecting a joint-space vector about the
    /// sagittal plane.
    pub fn mirror_permutation(&self) -> SignedPermutation {
        SignedPermutation::new(
            self.joints.iter().map(|j| j.partner).collect(),
            self.joints.iter().map(|j| j.sign).collect(),
        )
        .expect("validated layout yields an involution")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_layout_shape() {
        let l = JointLayout::h1();
        assert_eq!(l.len(), NUM_JOINTS);
        assert_eq!(l.upper_indices().len(), NUM_UPPER);
        assert_eq!(l.hip_xz_indices(), vec![0, 1, 5, 6]);
        assert_eq!(l.waist_index(), Some(10));
        assert_eq!(l.index_of("right_knee"), Some(8));
    }

    #[test]
    fn rejects_partner_that_does_not_map_back() {
        let text = "a b +1 -1 1 0 -\nb c +1 -1 1 0 -\nc c +1 -1 1 0 -\n";
        let err = JointLayout::parse(text).unwrap_err();
        assert!(matches!(err, Error::Layout { line: 1, .. }), "{err}");
    }

    #[test]
    fn rejects_unmirrored_limits() {
        let text = "l r -1 -0.3 1.0 0 -\nr l -1 -0.3 1.0 0 -\n";
        assert!(JointLayout::parse(text).is_err());
        let ok = "l r -1 -0.3 1.0 0 -\nr l -1 -1.0 0.3 0 -\n";
        assert!(JointLayout::parse(ok).is_ok());
    }

    #[test]
    fn rejects_bad_columns_and_tags() {
        assert!(JointLayout::parse("a a +1 -1 1\n").is_err());
        assert!(JointLayout::parse("a a +1 -1 1 0 legs\n").is_err());
        assert!(JointLayout::parse("a a 2 -1 1 0 -\n").is_err());
        assert!(JointLayout::parse("# only a comment\n").is_err());
        assert!(JointLayout::parse("a a +1 -1 1 0 -\na a +1 -1 1 0 -\n").is_err());
    }
}
