//! Robot structure files: labeled anchor points in a base or platform frame,
//! and six legs between them.
//!
//! Concurrent joints share one label. Validation reports every problem at
//! once instead of stopping at the first.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::Label;
use crate::error::{Error, Result};
use crate::numeric::{apply_pose, Coordinates, Point3, Pose};
use crate::superbracket::{Leg, LegOrder};

/// Most legs allowed on one label (triple concurrency).
pub const MAX_CONCURRENCY: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Base,
    Platform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RobotKind {
    /// Six SPS legs, each from a base anchor to a platform anchor.
    Gsp,
    /// Six user-supplied lines of action (e.g. reciprocal screws of a
    /// lower-mobility robot) between arbitrary anchors.
    EquivalentScrews,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorPoint {
    pub label: Label,
    pub frame: Frame,
    /// Coordinates in the anchor's own frame.
    pub xyz: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotStructure {
    pub name: String,
    pub kind: RobotKind,
    pub anchors: Vec<AnchorPoint>,
    /// `[first, second]` label pairs; for a GSP, `[base, platform]`.
    pub legs: Vec<[Label; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub message: String,
    pub labels: Vec<Label>,
}

impl Violation {
    fn new(message: impl Into<String>, labels: impl IntoIterator<Item = Label>) -> Self {
        Self {
            message: message.into(),
            labels: labels.into_iter().collect(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Concurrency signature: how many legs meet at each anchor, per side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureClass {
    /// `"<base anchors>-<platform anchors>"` counting only anchors used by legs, e.g. `"6-6"`.
    pub signature: String,
    /// Legs per used base anchor, descending.
    pub base_counts: Vec<usize>,
    /// Legs per used platform anchor, descending.
    pub platform_counts: Vec<usize>,
}

impl RobotStructure {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("structure serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    pub fn anchor(&self, l: &Label) -> Option<&AnchorPoint> {
        self.anchors.iter().find(|a| &a.label == l)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for a in &self.anchors {
            if !seen.insert(&a.label) {
                out.push(Violation::new(format!("duplicate anchor label {}", a.label), [a.label.clone()]));
            }
            if a.xyz.iter().any(|v| !v.is_finite()) {
                out.push(Violation::new(
                    format!("anchor {} has non-finite coordinates", a.label),
                    [a.label.clone()],
                ));
            }
        }
        if self.legs.len() != 6 {
            out.push(Violation::new(format!("expected 6 legs, got {}", self.legs.len()), []));
        }
        let frames: BTreeMap<&Label, Frame> = self.anchors.iter().map(|a| (&a.label, a.frame)).collect();
        let mut incidence: BTreeMap<&Label, usize> = BTreeMap::new();
        for (i, [x, y]) in self.legs.iter().enumerate() {
            let n = i + 1;
            for l in [x, y] {
                if !frames.contains_key(l) {
                    out.push(Violation::new(format!("leg {n} references unknown label {l}"), [l.clone()]));
                }
            }
            if x == y {
                out.push(Violation::new(format!("leg {n} joins {x} to itself"), [x.clone()]));
                *incidence.entry(x).or_default() += 1;
                continue;
            }
            *incidence.entry(x).or_default() += 1;
            *incidence.entry(y).or_default() += 1;
            if self.kind == RobotKind::Gsp {
                if frames.get(x).is_some_and(|f| *f != Frame::Base) {
                    out.push(Violation::new(
                        format!("leg {n} must start at a base anchor, {x} is on the platform"),
                        [x.clone()],
                    ));
                }
                if frames.get(y).is_some_and(|f| *f != Frame::Platform) {
                    out.push(Violation::new(
                        format!("leg {n} must end at a platform anchor, {y} is on the base"),
                        [y.clone()],
                    ));
                }
            }
        }
        for (l, count) in incidence {
            if count > MAX_CONCURRENCY {
                out.push(Violation::new(
                    format!("{count} legs meet at {l}; at most {MAX_CONCURRENCY} concurrent joints are supported"),
                    [l.clone()],
                ));
            }
        }
        out
    }

    /// The legs in file order, after validation.
    pub fn leg_order(&self) -> Result<LegOrder> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidStructure(violations.iter().map(|v| v.to_string()).collect()));
        }
        let legs = self
            .legs
            .iter()
            .map(|[x, y]| Leg::new(x.clone(), y.clone()))
            .collect::<Result<Vec<_>>>()?;
        LegOrder::new(legs)
    }

    pub fn classify(&self) -> StructureClass {
        let frames: BTreeMap<&Label, Frame> = self.anchors.iter().map(|a| (&a.label, a.frame)).collect();
        let mut incidence: BTreeMap<&Label, usize> = BTreeMap::new();
        for [x, y] in &self.legs {
            *incidence.entry(x).or_default() += 1;
            if y != x {
                *incidence.entry(y).or_default() += 1;
            }
        }
        let side = |frame: Frame| {
            let mut counts: Vec<usize> = incidence
                .iter()
                .filter(|(l, _)| frames.get(*l) == Some(&frame))
                .map(|(_, c)| *c)
                .collect();
            counts.sort_unstable_by(|a, b| b.cmp(a));
            counts
        };
        let (base_counts, platform_counts) = (side(Frame::Base), side(Frame::Platform));
        StructureClass {
            signature: format!("{}-{}", base_counts.len(), platform_counts.len()),
            base_counts,
            platform_counts,
        }
    }

    /// World coordinates of every anchor: base anchors as given, platform
    /// anchors moved by `pose`.
    pub fn coordinates_at(&self, pose: &Pose) -> Coordinates {
        self.anchors
            .iter()
            .map(|a| {
                let local = Point3::from(a.xyz);
                let world = match a.frame {
                    Frame::Base => local,
                    Frame::Platform => apply_pose(pose, &local),
                };
                (a.label.clone(), world)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::label;

    fn anchor(l: &str, frame: Frame, xyz: [f64; 3]) -> AnchorPoint {
        AnchorPoint {
            label: label(l),
            frame,
            xyz,
        }
    }

    fn octahedral() -> RobotStructure {
        let mut anchors = Vec::new();
        for (i, l) in ["a", "c", "e"].iter().enumerate() {
            let t = i as f64 * 2.0 * std::f64::consts::PI / 3.0;
            anchors.push(anchor(l, Frame::Base, [2.0 * t.cos(), 2.0 * t.sin(), 0.0]));
        }
        for (i, l) in ["b", "d", "f"].iter().enumerate() {
            let t = (i as f64 + 0.5) * 2.0 * std::f64::consts::PI / 3.0;
            anchors.push(anchor(l, Frame::Platform, [t.cos(), t.sin(), 0.0]));
        }
        RobotStructure {
            name: "octahedral".into(),
            kind: RobotKind::Gsp,
            anchors,
            legs: ["ab", "af", "cb", "cd", "ed", "ef"]
                .iter()
                .map(|s| [label(&s[..1]), label(&s[1..])])
                .collect(),
        }
    }

    #[test]
    fn octahedral_is_valid_three_three() {
        let s = octahedral();
        assert!(s.validate().is_empty());
        let class = s.classify();
        assert_eq!(class.signature, "3-3");
        assert_eq!(class.base_counts, [2, 2, 2]);
        assert_eq!(class.platform_counts, [2, 2, 2]);
        assert_eq!(s.leg_order().unwrap().to_string(), "[[ab, af, cb, cd, ed, ef]]");
    }

    #[test]
    fn four_legs_on_one_label() {
        let mut s = octahedral();
        s.legs[2] = [label("a"), label("b")];
        s.legs[3] = [label("a"), label("d")];
        let v = s.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].labels, [label("a")]);
        assert!(matches!(s.leg_order(), Err(Error::InvalidStructure(_))));
    }

    #[test]
    fn unknown_label_and_bad_frames() {
        let mut s = octahedral();
        s.legs[0] = [label("a"), label("z")];
        s.legs[1] = [label("b"), label("a")];
        let v = s.validate();
        assert!(v.iter().any(|x| x.message.contains("unknown label z")));
        assert!(v.iter().any(|x| x.message.contains("must start at a base anchor")));
        assert!(v.iter().any(|x| x.message.contains("must end at a platform anchor")));
    }

    #[test]
    fn wrong_leg_count_and_duplicates() {
        let mut s = octahedral();
        s.legs.pop();
        s.anchors.push(anchor("a", Frame::Base, [0.0; 3]));
        let msgs: Vec<String> = s.validate().into_iter().map(|v| v.message).collect();
        assert!(msgs.contains(&"expected 6 legs, got 5".to_string()));
        assert!(msgs.contains(&"duplicate anchor label a".to_string()));
    }

    #[test]
    fn equivalent_screws_ignore_frames() {
        let mut s = octahedral();
        s.kind = RobotKind::EquivalentScrews;
        s.legs[1] = [label("b"), label("a")];
        assert!(s.validate().is_empty());
    }

    #[test]
    fn poses_move_only_platform() {
        let s = octahedral();
        let home = s.coordinates_at(&Pose::identity());
        for a in &s.anchors {
            assert_eq!(home[&a.label], Point3::from(a.xyz));
        }
        let moved = s.coordinates_at(&Pose::translation([0.0, 0.0, 1.5]));
        for a in &s.anchors {
            let dz = moved[&a.label].z - home[&a.label].z;
            assert_eq!(dz, if a.frame == Frame::Platform { 1.5 } else { 0.0 });
        }
        assert_eq!(moved.len(), 6);
    }

    #[test]
    fn json_round_trip() {
        let s = octahedral();
        let text = s.to_json();
        assert!(text.contains("\"kind\": \"gsp\""));
        assert_eq!(RobotStructure::from_json(&text).unwrap(), s);
        let bad = text.replace("\"gsp\"", "\"hexapod\"");
        assert!(matches!(RobotStructure::from_json(&bad), Err(Error::Parse(_))));
    }
}
