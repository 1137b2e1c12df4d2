#![allow(dead_code)]

use std::path::PathBuf;

use gsp_singularity::numeric::{Coordinates, Point3, Pose};
use gsp_singularity::robot::RobotStructure;
use nalgebra::Vector3;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const FIXTURES: [&str; 3] = ["generic-6-6", "octahedral-3-3", "equivalent-screws"];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"))
}

pub fn fixture(name: &str) -> RobotStructure {
    RobotStructure::load(fixture_path(name)).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A moderate pose: rotation up to 0.4 rad about a random axis, translation
/// within ±0.3 per axis.
pub fn random_pose(rng: &mut impl Rng) -> Pose {
    let axis = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(0.2..1.0));
    let t = [0.0; 3].map(|_: f64| rng.random_range(-0.3..0.3));
    Pose::from_axis_angle(axis, rng.random_range(-0.4..0.4), t)
}

/// An arbitrary rigid motion (any rotation) for invariance checks.
pub fn random_rigid(rng: &mut impl Rng) -> Pose {
    let axis = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let t = [0.0; 3].map(|_: f64| rng.random_range(-5.0..5.0));
    Pose::from_axis_angle(axis, rng.random_range(-3.0..3.0), t)
}

pub fn map_coords(coords: &Coordinates, f: impl Fn(&Point3) -> Point3) -> Coordinates {
    coords.iter().map(|(l, p)| (l.clone(), f(p))).collect()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}
