use std::path::Path;

use anyhow::{bail, Context, Result};
use gsp_singularity::analysis::{analyze, to_json, to_text, AnalyzeOptions, ManualEntities, Session};
use gsp_singularity::numeric::Pose;
use gsp_singularity::robot::RobotStructure;
use gsp_singularity::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

/// Parses `tx,ty,tz,qw,qx,qy,qz`.
pub fn parse_pose(text: &str) -> Result<Pose> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("pose `{text}` is not a list of numbers"))?;
    let [tx, ty, tz, qw, qx, qy, qz] = v[..] else {
        bail!("pose needs 7 comma-separated values tx,ty,tz,qw,qx,qy,qz, got {}", v.len());
    };
    Ok(Pose::new([tx, ty, tz], [qw, qx, qy, qz])?)
}

/// Turns structure violations into a readable multi-line error.
pub fn describe(err: Error) -> anyhow::Error {
    match err {
        Error::InvalidStructure(violations) => {
            let list: String = violations.iter().map(|v| format!("\n  - {v}")).collect();
            anyhow::anyhow!("invalid robot structure:{list}")
        }
        other => other.into(),
    }
}

pub fn load_session(file: &Path, auto_reduce: bool, manual: Option<&Path>) -> Result<Session> {
    let structure = RobotStructure::load(file).map_err(describe)?;
    let manual = match manual {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let m = ManualEntities::from_json(&text).with_context(|| format!("manual entities in {}", path.display()))?;
            Some(m.entities)
        }
        None => None,
    };
    analyze(&structure, &AnalyzeOptions { auto_reduce, manual }).map_err(describe)
}

pub fn analyze_output(session: &Session, format: Format) -> String {
    match format {
        Format::Json => to_json(&session.result),
        Format::Text => to_text(&session.result),
    }
}

pub fn evaluate_output(session: &Session, pose: &Pose, epsilon: f64) -> Result<String> {
    Ok(to_json(&session.evaluate(pose, epsilon)?))
}

pub fn condition_output(session: &Session) -> String {
    to_json(&session.result.condition)
}

pub fn entities_output(session: &Session, pose: &Pose) -> String {
    to_json(&session.entities(pose))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pose_parsing() {
        let p = parse_pose("0, 0, 1.5, 1, 0, 0, 0").unwrap();
        assert_eq!(p.to_array(), [0.0, 0.0, 1.5, 1.0, 0.0, 0.0, 0.0]);
        assert!(parse_pose("0,0,0,1,0,0").is_err());
        assert!(parse_pose("0,0,0,2,0,0,0").is_err());
        assert!(parse_pose("0,0,x,1,0,0,0").is_err());
    }

    #[test]
    fn violations_are_listed() {
        let msg = describe(Error::InvalidStructure(vec!["one".into(), "two".into()])).to_string();
        assert_eq!(msg, "invalid robot structure:\n  - one\n  - two");
    }
}
