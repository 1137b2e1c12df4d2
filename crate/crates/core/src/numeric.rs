//! Numeric evaluation: poses, bracket values, the Plücker-coordinate
//! Jacobian, condition-number incidence checks and the proximity report.

use std::collections::BTreeMap;

use itertools::Itertools;
use nalgebra::{DMatrix, Matrix3, Matrix4, Matrix6, Quaternion, RowVector6, UnitQuaternion, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::algebra::{BracketPolynomial, Extensor, Label, DIM};
use crate::error::{Error, Result};
use crate::identify::{EntityKind, GeometricEntity, Group, SingularityCondition};
use crate::superbracket::LegOrder;

pub type Point3 = nalgebra::Point3<f64>;

pub type Coordinates = BTreeMap<Label, Point3>;

/// Default threshold on the normalized singularity measure.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Condition numbers above this flag a check as singular.
pub const DEFAULT_CONDITION_THRESHOLD: f64 = 1e6;

/// Relative size of the smallest singular value below which a matrix is
/// treated as exactly singular (condition number reported as infinity).
pub const ZERO_TOLERANCE: f64 = 1e-9;

const QUATERNION_NORM_TOLERANCE: f64 = 1e-9;

/// Rigid platform pose: `p -> R p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub translation: Vector3<f64>,
    pub rotation: UnitQuaternion<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Self {
            translation: Vector3::zeros(),
            rotation: UnitQuaternion::identity(),
        }
    }

    /// Builds a pose from a translation and a quaternion `(w, x, y, z)` that
    /// must already have unit norm.
    pub fn new(translation: [f64; 3], quaternion: [f64; 4]) -> Result<Self> {
        let [w, x, y, z] = quaternion;
        let q = Quaternion::new(w, x, y, z);
        if translation.iter().chain(&quaternion).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("pose has non-finite components".into()));
        }
        if (q.norm() - 1.0).abs() > QUATERNION_NORM_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "rotation quaternion must have unit norm, got {}",
                q.norm()
            )));
        }
        Ok(Self {
            translation: Vector3::from(translation),
            rotation: UnitQuaternion::new_unchecked(q),
        })
    }

    pub fn translation(t: [f64; 3]) -> Self {
        Self {
            translation: Vector3::from(t),
            ..Self::identity()
        }
    }

    pub fn from_axis_angle(axis: Vector3<f64>, angle: f64, translation: [f64; 3]) -> Self {
        Self {
            translation: Vector3::from(translation),
            rotation: UnitQuaternion::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            translation: self.rotation * other.translation + self.translation,
            rotation: self.rotation * other.rotation,
        }
    }

    /// `[tx, ty, tz, qw, qx, qy, qz]`.
    pub fn to_array(&self) -> [f64; 7] {
        let q = self.rotation.quaternion();
        let t = self.translation;
        [t.x, t.y, t.z, q.w, q.i, q.j, q.k]
    }
}

pub fn apply_pose(pose: &Pose, p: &Point3) -> Point3 {
    pose.rotation * p + pose.translation
}

fn homogeneous(p: &Point3) -> Vector4<f64> {
    Vector4::new(p.x, p.y, p.z, 1.0)
}

/// Determinant of the 4x4 matrix whose columns are the homogeneous
/// coordinates of the four points. Six times the signed tetrahedron volume.
pub fn bracket_value(a: &Point3, b: &Point3, c: &Point3, d: &Point3) -> f64 {
    Matrix4::from_columns(&[homogeneous(a), homogeneous(b), homogeneous(c), homogeneous(d)]).determinant()
}

fn lookup<'a>(coords: &'a Coordinates, l: &Label) -> Result<&'a Point3> {
    coords.get(l).ok_or_else(|| Error::MissingLabel(l.clone()))
}

/// Sum over monomials of coefficient times the product of bracket values.
pub fn evaluate_polynomial(p: &BracketPolynomial, coords: &Coordinates) -> Result<f64> {
    let mut total = 0.0;
    for (brackets, c) in p.terms() {
        let mut v = c as f64;
        for b in brackets {
            let [a, b2, c2, d] = b.points();
            v *= bracket_value(
                lookup(coords, a)?,
                lookup(coords, b2)?,
                lookup(coords, c2)?,
                lookup(coords, d)?,
            );
        }
        total += v;
    }
    Ok(total)
}

/// Numeric value of an extensor: its coordinates on the basis
/// `e_I, I ⊂ {0,1,2,3}, |I| = step`, subsets in lexicographic order. A
/// scalar evaluates to a single component.
pub fn evaluate_extensor(e: &Extensor, coords: &Coordinates) -> Result<Vec<f64>> {
    let k = e.step();
    let subsets: Vec<Vec<usize>> = (0..DIM).combinations(k).collect();
    let mut out = vec![0.0; subsets.len()];
    for (points, coefficient) in e.terms() {
        let weight = evaluate_polynomial(coefficient, coords)?;
        let cols: Vec<Vector4<f64>> = points
            .iter()
            .map(|l| lookup(coords, l).map(homogeneous))
            .collect::<Result<_>>()?;
        for (slot, rows) in out.iter_mut().zip(&subsets) {
            let minor = DMatrix::from_fn(k, k, |r, c| cols[c][rows[r]]);
            *slot += weight * minor.determinant();
        }
    }
    Ok(out)
}

/// A line in Plücker coordinates `(direction; moment)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PluckerLine {
    pub direction: Vector3<f64>,
    pub moment: Vector3<f64>,
}

impl PluckerLine {
    /// The line from `base` towards `tip`: direction `tip - base`, moment
    /// `base × direction`.
    pub fn through(base: &Point3, tip: &Point3) -> Option<Self> {
        let direction = tip - base;
        if direction.norm() == 0.0 {
            return None;
        }
        Some(Self {
            direction,
            moment: base.coords.cross(&direction),
        })
    }

    pub fn row(&self) -> RowVector6<f64> {
        let (d, m) = (self.direction, self.moment);
        RowVector6::new(d.x, d.y, d.z, m.x, m.y, m.z)
    }
}

/// Determinant of the 6x6 matrix whose rows are the legs' Plücker
/// coordinates, in leg order.
pub fn jacobian_oracle(order: &LegOrder, coords: &Coordinates) -> Result<f64> {
    let mut rows = Vec::with_capacity(6);
    for leg in order.legs() {
        let (b, p) = (leg.base(), leg.platform());
        let line = PluckerLine::through(lookup(coords, b)?, lookup(coords, p)?)
            .ok_or_else(|| Error::DegenerateLeg(b.clone(), p.clone()))?;
        rows.push(line.row());
    }
    Ok(Matrix6::from_rows(&rows).determinant())
}

/// Plane through three points as `(n, d0)` with `n·p + d0 = 0`,
/// `n = (b − a) × (c − a)`.
pub fn plane_coeffs(a: &Point3, b: &Point3, c: &Point3) -> Result<Vector4<f64>> {
    let n = (b - a).cross(&(c - a));
    let scale = (b - a).norm().max((c - a).norm());
    if n.norm() <= ZERO_TOLERANCE * scale * scale || scale == 0.0 {
        return Err(Error::DegeneratePlane);
    }
    Ok(Vector4::new(n.x, n.y, n.z, -n.dot(&a.coords)))
}

/// Spectral condition number `σ_max / σ_min`; infinite when `σ_min` is
/// negligible relative to `σ_max`.
pub fn condition_number(m: &Matrix4<f64>) -> f64 {
    let sv = m.svd(false, false).singular_values;
    let (max, min) = (sv.max(), sv.min());
    if max == 0.0 || min <= ZERO_TOLERANCE * max {
        f64::INFINITY
    } else {
        max / min
    }
}

fn unit_plane(p: &Vector4<f64>) -> Result<Vector4<f64>> {
    let n = p.xyz().norm();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::DegeneratePlane);
    }
    Ok(p / n)
}

/// Condition number of the stacked plane equations, each row scaled to a
/// unit normal. Infinite iff the four planes share a point.
pub fn check_four_planes(planes: &[Vector4<f64>; 4]) -> Result<f64> {
    let rows: Vec<_> = planes
        .iter()
        .map(|p| unit_plane(p).map(|u| u.transpose()))
        .collect::<Result<_>>()?;
    Ok(condition_number(&Matrix4::from_rows(&rows)))
}

/// The intersection line of two planes as (closest point to the origin,
/// unit direction).
pub fn plane_intersection(pl1: &Vector4<f64>, pl2: &Vector4<f64>) -> Result<(Point3, Vector3<f64>)> {
    let (p1, p2) = (unit_plane(pl1)?, unit_plane(pl2)?);
    let (n1, n2) = (p1.xyz(), p2.xyz());
    let u = n1.cross(&n2);
    if u.norm() <= ZERO_TOLERANCE {
        return Err(Error::DegenerateIntersection);
    }
    let system = Matrix3::from_rows(&[n1.transpose(), n2.transpose(), u.transpose()]);
    let rhs = Vector3::new(-p1.w, -p2.w, 0.0);
    let x = system.lu().solve(&rhs).ok_or(Error::DegenerateIntersection)?;
    Ok((Point3::from(x), u.normalize()))
}

/// Condition number of the 4x4 homogeneous matrix of two points on the
/// planes' intersection line and the line's two points. Infinite iff the
/// two lines are coplanar (they meet or are parallel).
pub fn check_planes_and_line(
    pl1: &Vector4<f64>,
    pl2: &Vector4<f64>,
    q1: &Point3,
    q2: &Point3,
) -> Result<f64> {
    if q1 == q2 {
        return Err(Error::DegenerateGeometry("line endpoints coincide".into()));
    }
    let (origin, dir) = plane_intersection(pl1, pl2)?;
    let rows = [origin, origin + dir, *q1, *q2].map(|p| homogeneous(&p).transpose());
    Ok(condition_number(&Matrix4::from_rows(&rows)))
}

fn serialize_condition<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn deserialize_condition<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

/// One incidence check attached to a report. An infinite condition number
/// serializes as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub name: String,
    #[serde(serialize_with = "serialize_condition", deserialize_with = "deserialize_condition")]
    pub condition_number: f64,
    pub singular: bool,
}

impl ConditionCheck {
    fn new(name: String, condition_number: f64) -> Self {
        Self {
            name,
            singular: condition_number > DEFAULT_CONDITION_THRESHOLD,
            condition_number,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub raw_value: f64,
    /// `|raw_value| / L^(3m)` for `m` brackets per monomial and `L` the
    /// largest distance between two points.
    pub normalized_measure: f64,
    pub epsilon: f64,
    pub near_singular: bool,
    pub checks: Vec<ConditionCheck>,
}

/// Largest pairwise distance between the given points.
pub fn characteristic_length(coords: &Coordinates) -> f64 {
    let pts: Vec<&Point3> = coords.values().collect();
    pts.iter()
        .tuple_combinations()
        .map(|(a, b)| (*a - *b).norm())
        .fold(0.0, f64::max)
}

fn entity_points(e: &GeometricEntity, coords: &Coordinates) -> Result<Vec<Point3>> {
    e.labels
        .iter()
        .map(|l| lookup(coords, &l.unstarred()).copied())
        .collect()
}

fn entity_plane(e: &GeometricEntity, coords: &Coordinates) -> Result<Vector4<f64>> {
    let pts = entity_points(e, coords)?;
    plane_coeffs(&pts[0], &pts[1], &pts[2])
}

/// Condition-number checks matching an identified condition: the four-plane
/// check for group c, and the two-planes-and-a-line check for every line
/// of groups b and d.
pub fn condition_checks(condition: &SingularityCondition, coords: &Coordinates) -> Result<Vec<ConditionCheck>> {
    let planes: Vec<&GeometricEntity> = condition.entities_of(EntityKind::Plane).collect();
    let lines: Vec<&GeometricEntity> = condition.entities_of(EntityKind::Line).collect();
    let mut out = Vec::new();
    match condition.group {
        Group::C if planes.len() == 4 => {
            let coeffs = [
                entity_plane(planes[0], coords)?,
                entity_plane(planes[1], coords)?,
                entity_plane(planes[2], coords)?,
                entity_plane(planes[3], coords)?,
            ];
            let name = format!("four_planes({})", planes.iter().map(|p| p.name()).join(", "));
            out.push(ConditionCheck::new(name, check_four_planes(&coeffs)?));
        }
        Group::B | Group::D if planes.len() == 2 => {
            let (pl1, pl2) = (entity_plane(planes[0], coords)?, entity_plane(planes[1], coords)?);
            for line in lines {
                let pts = entity_points(line, coords)?;
                let name = format!("planes_and_line({}, {}; {})", planes[0].name(), planes[1].name(), line.name());
                out.push(ConditionCheck::new(name, check_planes_and_line(&pl1, &pl2, &pts[0], &pts[1])?));
            }
        }
        _ => {}
    }
    Ok(out)
}

/// Evaluates `p` at `coords` and compares the scale-free measure against
/// `epsilon`.
pub fn singularity_report(
    p: &BracketPolynomial,
    coords: &Coordinates,
    epsilon: f64,
    condition: Option<&SingularityCondition>,
) -> Result<SingularityReport> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be a finite non-negative number, got {epsilon}")));
    }
    let raw_value = evaluate_polynomial(p, coords)?;
    let length = characteristic_length(coords);
    if length == 0.0 {
        return Err(Error::DegenerateGeometry("all points coincide".into()));
    }
    let normalized_measure = raw_value.abs() / length.powi(3 * p.degree() as i32);
    let checks = match condition {
        Some(c) => condition_checks(c, coords)?,
        None => Vec::new(),
    };
    Ok(SingularityReport {
        raw_value,
        normalized_measure,
        epsilon,
        near_singular: normalized_measure < epsilon,
        checks,
    })
}

/// Coplanarity of four points, relative to their spread.
pub fn is_coplanar(a: &Point3, b: &Point3, c: &Point3, d: &Point3) -> bool {
    let pts = [a, b, c, d];
    let length = pts
        .iter()
        .tuple_combinations()
        .map(|(p, q)| (*p - *q).norm())
        .fold(0.0, f64::max);
    length == 0.0 || bracket_value(a, b, c, d).abs() / length.powi(3) < ZERO_TOLERANCE
}
