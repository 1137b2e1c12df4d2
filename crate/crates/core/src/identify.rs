//! Identification of the geometric entities behind a reduced superbracket
//! and translation into a singularity condition.
//!
//! The search runs in a fixed order: tetrahedra (brackets common to every
//! monomial), planes (triples sharing one bracket in every monomial), then
//! lines (interchangeable pairs among the remaining, unstarred points), and
//! finally the residual-letter rules. Each candidate entity set is
//! classified into one of the groups a–g and checked by expanding the
//! corresponding join/meet expression and comparing it with the polynomial.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::algebra::{join, meet, meet_all, Bracket, BracketPolynomial, Extensor, Label, Monomial};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Line,
    Plane,
    Tetrahedron,
}

impl EntityKind {
    pub fn size(self) -> usize {
        match self {
            EntityKind::Line => 2,
            EntityKind::Plane => 3,
            EntityKind::Tetrahedron => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GeometricEntity {
    pub kind: EntityKind,
    /// Sorted, unstarred point labels.
    pub labels: Vec<Label>,
    /// Set on planes whose occurrences were starred during identification.
    #[serde(default)]
    pub starred: bool,
}

impl GeometricEntity {
    pub fn new(kind: EntityKind, labels: impl IntoIterator<Item = Label>) -> Result<Self> {
        let mut labels: Vec<Label> = labels.into_iter().map(|l| l.unstarred()).collect();
        labels.sort();
        labels.dedup();
        if labels.len() != kind.size() {
            return Err(Error::InvalidInput(format!(
                "a {kind:?} needs {} distinct points, got {}",
                kind.size(),
                labels.len()
            )));
        }
        Ok(Self {
            kind,
            labels,
            starred: false,
        })
    }

    pub fn line(a: Label, b: Label) -> Result<Self> {
        Self::new(EntityKind::Line, [a, b])
    }

    pub fn plane(labels: [Label; 3]) -> Result<Self> {
        Self::new(EntityKind::Plane, labels)
    }

    pub fn tetrahedron(labels: [Label; 4]) -> Result<Self> {
        Self::new(EntityKind::Tetrahedron, labels)
    }

    pub fn name(&self) -> String {
        let compact = self.labels.iter().all(|l| l.as_str().chars().count() == 1);
        self.labels.iter().join(if compact { "" } else { " " })
    }

    pub fn extensor(&self) -> Extensor {
        Extensor::join_of(&self.labels).expect("entity has at most four points")
    }

    fn bracket(&self) -> BracketPolynomial {
        debug_assert_eq!(self.kind, EntityKind::Tetrahedron);
        self.extensor().as_bracket_multiple().expect("step 4")
    }
}

impl fmt::Display for GeometricEntity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Entity groups: which multisets of lines, planes and tetrahedra can make
/// up a product of three 4-brackets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    /// Six lines.
    A,
    /// Two planes, three lines.
    B,
    /// Four planes.
    C,
    /// One tetrahedron, two planes, one line.
    D,
    /// One tetrahedron, four lines.
    E,
    /// Two tetrahedra, two lines.
    F,
    /// Three tetrahedra.
    G,
    None,
}

impl Group {
    /// `(tetrahedra, planes, lines)`.
    pub fn signature(self) -> Option<(usize, usize, usize)> {
        Some(match self {
            Group::A => (0, 0, 6),
            Group::B => (0, 2, 3),
            Group::C => (0, 4, 0),
            Group::D => (1, 2, 1),
            Group::E => (1, 0, 4),
            Group::F => (2, 0, 2),
            Group::G => (3, 0, 0),
            Group::None => return None,
        })
    }

    pub fn from_counts(tetrahedra: usize, planes: usize, lines: usize) -> Group {
        [Group::A, Group::B, Group::C, Group::D, Group::E, Group::F, Group::G]
            .into_iter()
            .find(|g| g.signature() == Some((tetrahedra, planes, lines)))
            .unwrap_or(Group::None)
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::A => "a",
            Group::B => "b",
            Group::C => "c",
            Group::D => "d",
            Group::E => "e",
            Group::F => "f",
            Group::G => "g",
            Group::None => "none",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verification {
    Verified,
    NotVerified,
    NotAttempted,
}

impl fmt::Display for Verification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verification::Verified => "verified",
            Verification::NotVerified => "not verified",
            Verification::NotAttempted => "not attempted",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularityCondition {
    pub group: Group,
    pub entities: Vec<GeometricEntity>,
    pub statement: String,
    pub residual: Vec<Label>,
    pub verified: Verification,
    /// The join/meet expression that reproduced the polynomial, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl SingularityCondition {
    pub fn entities_of(&self, kind: EntityKind) -> impl Iterator<Item = &GeometricEntity> {
        self.entities.iter().filter(move |e| e.kind == kind)
    }

    fn count(&self, kind: EntityKind) -> usize {
        self.entities_of(kind).count()
    }
}

fn names<'a>(entities: impl IntoIterator<Item = &'a GeometricEntity>) -> String {
    entities.into_iter().map(GeometricEntity::name).join(", ")
}

/// Repeatedly factors out a bracket that appears in every monomial. A
/// single monomial factors completely, leaving a constant.
pub fn find_tetrahedra(p: &BracketPolynomial) -> (Vec<GeometricEntity>, BracketPolynomial) {
    let mut remainder = p.clone();
    let mut found = Vec::new();
    if p.is_zero() {
        return (found, remainder);
    }
    loop {
        let common = remainder.terms().next().and_then(|(first, _)| {
            first
                .iter()
                .find(|b| remainder.terms().all(|(bs, _)| bs.contains(b)))
                .cloned()
        });
        let Some(b) = common else { break };
        remainder = remainder.divide_by_bracket(&b).expect("common bracket");
        found.push(GeometricEntity {
            kind: EntityKind::Tetrahedron,
            labels: b.points().to_vec(),
            starred: false,
        });
    }
    (found, remainder)
}

/// Indices of the brackets of `brackets` whose unstarred occurrences contain
/// every label of `plane`.
fn hosts(brackets: &[Bracket], plane: &[Label]) -> Vec<usize> {
    brackets
        .iter()
        .enumerate()
        .filter(|(_, b)| plane.iter().all(|l| b.points().contains(l)))
        .map(|(i, _)| i)
        .collect()
}

/// Label triples that sit together in one bracket of every monomial and are
/// pairwise interchangeable once their occurrences are starred.
pub fn find_planes(remainder: &BracketPolynomial) -> Vec<GeometricEntity> {
    let labels: Vec<Label> = remainder.labels().into_iter().filter(|l| !l.is_starred()).collect();
    let mut planes = Vec::new();
    for triple in labels.iter().cloned().combinations(3) {
        let coresident = remainder.terms().all(|(bs, _)| !hosts(bs, &triple).is_empty());
        if !coresident {
            continue;
        }
        let plane = GeometricEntity::new(EntityKind::Plane, triple).expect("three labels");
        let interchangeable = match star_relabel(remainder, std::slice::from_ref(&plane)) {
            Ok(starred) => plane.labels.iter().tuple_combinations().all(|(x, y)| {
                starred
                    .swap_interchange_test(&x.starred(), &y.starred())
                    .expect("distinct labels")
            }),
            // Doubly hosted triple: keep it and let star_relabel flag it
            // when the plane is used.
            Err(_) => true,
        };
        if interchangeable {
            planes.push(plane);
        }
    }
    planes
}

/// Renames the occurrences of each plane's points inside its hosting bracket
/// to starred labels (`a -> a*`), so that other occurrences of the same
/// points are treated as distinct.
pub fn star_relabel(p: &BracketPolynomial, planes: &[GeometricEntity]) -> Result<BracketPolynomial> {
    if planes.is_empty() {
        return Ok(p.clone());
    }
    let mut monomials = Vec::new();
    for (brackets, c) in p.terms() {
        let mut pts: Vec<Vec<Label>> = brackets.iter().map(|b| b.points().to_vec()).collect();
        for plane in planes {
            let host = hosts(brackets, &plane.labels);
            match host.as_slice() {
                [i] => {
                    for l in pts[*i].iter_mut() {
                        if plane.labels.contains(l) {
                            *l = l.starred();
                        }
                    }
                }
                [] => {
                    return Err(Error::InvalidInput(format!(
                        "plane {plane} is not contained in one bracket of every monomial"
                    )))
                }
                many => {
                    return Err(Error::AmbiguousStar {
                        label: plane.labels[0].clone(),
                        plane: plane.name(),
                        count: many.len(),
                    })
                }
            }
        }
        if let Some(m) = Monomial::from_points(c, &pts)? {
            monomials.push(m);
        }
    }
    Ok(BracketPolynomial::from_monomials(monomials))
}

pub fn unstar(p: &BracketPolynomial) -> BracketPolynomial {
    p.substitute(Label::unstarred)
}

fn unstarred_labels(p: &BracketPolynomial) -> BTreeSet<Label> {
    p.labels().into_iter().filter(|l| !l.is_starred()).collect()
}

/// Interchangeable pairs among the unstarred points, and the unstarred
/// points left in no pair.
pub fn find_line_pairs(p: &BracketPolynomial) -> (Vec<GeometricEntity>, Vec<Label>) {
    let labels = unstarred_labels(p);
    let lines: Vec<GeometricEntity> = labels
        .iter()
        .tuple_combinations()
        .filter(|(x, y)| p.swap_interchange_test(x, y).expect("distinct labels"))
        .map(|(x, y)| GeometricEntity::line(x.clone(), y.clone()).expect("distinct labels"))
        .collect();
    let used: BTreeSet<&Label> = lines.iter().flat_map(|l| &l.labels).collect();
    let residual = labels.iter().filter(|l| !used.contains(l)).cloned().collect();
    (lines, residual)
}

/// All maximum-size subsets of `0..n` whose members are pairwise
/// compatible, in lexicographic order.
fn maximum_packings(n: usize, compatible: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    fn extend(
        start: usize,
        n: usize,
        current: &mut Vec<usize>,
        compatible: &dyn Fn(usize, usize) -> bool,
        best: &mut (usize, Vec<Vec<usize>>),
    ) {
        if current.len() + (n - start) < best.0 {
            return;
        }
        if current.len() > best.0 {
            *best = (current.len(), Vec::new());
        }
        if current.len() == best.0 && (start == n || current.len() + (n - start) == best.0) {
            // Record only at leaves to avoid duplicates.
        }
        for i in start..n {
            if current.iter().all(|&j| compatible(j, i)) {
                current.push(i);
                extend(i + 1, n, current, compatible, best);
                current.pop();
            }
        }
        if current.len() == best.0 {
            let maximal = (0..n).all(|i| current.contains(&i) || !current.iter().all(|&j| compatible(j, i)));
            if maximal && !best.1.contains(current) {
                best.1.push(current.clone());
            }
        }
    }
    let mut best = (0, Vec::new());
    extend(0, n, &mut Vec::new(), &compatible, &mut best);
    let mut out = best.1;
    out.sort();
    if out.is_empty() {
        out.push(Vec::new());
    }
    out
}

/// Plane subsets whose members occupy distinct brackets in every monomial.
fn plane_packings(remainder: &BracketPolynomial, planes: &[GeometricEntity]) -> Vec<Vec<GeometricEntity>> {
    let host_sets: Vec<Vec<Vec<usize>>> = planes
        .iter()
        .map(|pl| remainder.terms().map(|(bs, _)| hosts(bs, &pl.labels)).collect())
        .collect();
    let compatible = |i: usize, j: usize| {
        host_sets[i]
            .iter()
            .zip(&host_sets[j])
            .all(|(hi, hj)| !(hi.len() == 1 && hi == hj))
    };
    maximum_packings(planes.len(), compatible)
        .into_iter()
        .map(|idx| idx.into_iter().map(|i| planes[i].clone()).collect())
        .collect()
}

fn line_packings(lines: &[GeometricEntity]) -> Vec<Vec<GeometricEntity>> {
    let disjoint = |i: usize, j: usize| lines[i].labels.iter().all(|l| !lines[j].labels.contains(l));
    maximum_packings(lines.len(), disjoint)
        .into_iter()
        .map(|idx| idx.into_iter().map(|i| lines[i].clone()).collect())
        .collect()
}

/// Candidate completions of an entity set by the residual-letter rules:
/// three planes and three residual points give a fourth plane; three planes,
/// one line and one residual point merge into a fourth plane; two planes,
/// one line and four residual points give two more lines (every pairing).
pub fn resolve_residual(
    entities: &[GeometricEntity],
    residual: &[Label],
) -> Vec<(Vec<GeometricEntity>, Vec<Label>)> {
    let count = |k| entities.iter().filter(|e| e.kind == k).count();
    let (t, p, l) = (count(EntityKind::Tetrahedron), count(EntityKind::Plane), count(EntityKind::Line));
    let mut out = Vec::new();
    if t == 0 && p == 3 && l == 0 && residual.len() == 3 {
        let plane = GeometricEntity::new(EntityKind::Plane, residual.iter().cloned()).expect("three labels");
        let mut es = entities.to_vec();
        es.push(plane);
        out.push((es, Vec::new()));
    } else if t == 0 && p == 3 && l == 1 && residual.len() == 1 {
        let line = entities.iter().find(|e| e.kind == EntityKind::Line).expect("one line");
        let pts = line.labels.iter().chain(residual).cloned();
        if let Ok(plane) = GeometricEntity::new(EntityKind::Plane, pts) {
            let mut es: Vec<_> = entities.iter().filter(|e| e.kind != EntityKind::Line).cloned().collect();
            es.push(plane);
            out.push((es, Vec::new()));
        }
    } else if t == 0 && p == 2 && l == 1 && residual.len() == 4 {
        let r = residual;
        for (x, y) in [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))] {
            let l1 = GeometricEntity::line(r[x.0].clone(), r[x.1].clone());
            let l2 = GeometricEntity::line(r[y.0].clone(), r[y.1].clone());
            if let (Ok(l1), Ok(l2)) = (l1, l2) {
                let mut es = entities.to_vec();
                es.extend([l1, l2]);
                out.push((es, Vec::new()));
            }
        }
    }
    if out.is_empty() {
        out.push((entities.to_vec(), residual.to_vec()));
    }
    out
}

fn group_statement(group: Group, entities: &[GeometricEntity]) -> String {
    let of = |k| names(entities.iter().filter(|e| e.kind == k));
    let (tets, planes, lines) = (of(EntityKind::Tetrahedron), of(EntityKind::Plane), of(EntityKind::Line));
    match group {
        Group::A => "no special geometric condition by this method (six general lines, general GSP)".into(),
        Group::B => format!("singular iff planes {planes} and lines {lines} are in special incidence"),
        Group::C => format!("singular iff the four planes {planes} meet at a common point"),
        Group::D => format!(
            "singular iff tetrahedron {tets} is coplanar (degenerate) or line {lines} meets the intersection line of planes {planes}"
        ),
        Group::E => format!("singular iff tetrahedron {tets} is coplanar (degenerate) or lines {lines} are in special incidence"),
        Group::F => format!("singular iff at least one tetrahedron coplanar (degenerate): {tets}; or lines {lines} are coplanar"),
        Group::G => format!("singular iff at least one tetrahedron coplanar (degenerate): {tets}"),
        Group::None => String::new(),
    }
}

/// Matches an entity multiset (after residual resolution) to a group.
pub fn classify(entities: &[GeometricEntity], residual: &[Label]) -> SingularityCondition {
    let (entities, residual) = resolve_residual(entities, residual).swap_remove(0);
    classify_resolved(entities, residual)
}

fn classify_resolved(mut entities: Vec<GeometricEntity>, residual: Vec<Label>) -> SingularityCondition {
    entities.sort_by(|a, b| b.kind.cmp(&a.kind).then_with(|| a.labels.cmp(&b.labels)));
    let count = |k| entities.iter().filter(|e| e.kind == k).count();
    let (t, p, l) = (count(EntityKind::Tetrahedron), count(EntityKind::Plane), count(EntityKind::Line));
    let group = if residual.is_empty() {
        Group::from_counts(t, p, l)
    } else {
        Group::None
    };
    let (statement, diagnostic) = if group == Group::None {
        let res = if residual.is_empty() {
            String::new()
        } else {
            format!("; residual ({})", residual.iter().join(" "))
        };
        let msg = format!("{t} tetrahedra, {p} planes, {l} lines{res}");
        (format!("no entity group matches: {msg}"), Some(format!("unmatched entity multiset: {msg}")))
    } else {
        (group_statement(group, &entities), None)
    };
    SingularityCondition {
        group,
        entities,
        statement,
        residual,
        verified: Verification::NotAttempted,
        expression: None,
        diagnostic,
    }
}

/// A join/meet expression built from the entities, with its evaluation.
struct Candidate {
    text: String,
    statement: Option<String>,
    value: BracketPolynomial,
}

fn scalar_meet(chain: &[&GeometricEntity]) -> Result<BracketPolynomial> {
    let exts: Vec<Extensor> = chain.iter().map(|e| e.extensor()).collect();
    meet_all(&exts)?
        .as_scalar()
        .ok_or_else(|| Error::InvalidInput("meet chain is not a scalar".into()))
}

fn candidates(cond: &SingularityCondition) -> Result<Vec<Candidate>> {
    let tets: Vec<&GeometricEntity> = cond.entities_of(EntityKind::Tetrahedron).collect();
    let planes: Vec<&GeometricEntity> = cond.entities_of(EntityKind::Plane).collect();
    let lines: Vec<&GeometricEntity> = cond.entities_of(EntityKind::Line).collect();
    let tet_product = tets.iter().fold(BracketPolynomial::one(), |acc, t| &acc * &t.bracket());
    let tet_text = tets.iter().map(|t| format!("[{}]", t.name())).join("·");
    let with_tets = |text: String| {
        if tet_text.is_empty() {
            text
        } else {
            format!("{tet_text}·{text}")
        }
    };
    let mut out = Vec::new();
    match cond.group {
        Group::G => out.push(Candidate {
            text: tet_text.clone(),
            statement: None,
            value: tet_product.clone(),
        }),
        Group::F => out.push(Candidate {
            text: with_tets(format!("({} ∧ {})", lines[0], lines[1])),
            statement: None,
            value: &tet_product * &scalar_meet(&[lines[0], lines[1]])?,
        }),
        Group::E => {
            for (x, y) in [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))] {
                let v = &scalar_meet(&[lines[x.0], lines[x.1]])? * &scalar_meet(&[lines[y.0], lines[y.1]])?;
                out.push(Candidate {
                    text: with_tets(format!(
                        "({} ∧ {})·({} ∧ {})",
                        lines[x.0], lines[x.1], lines[y.0], lines[y.1]
                    )),
                    statement: Some(format!(
                        "singular iff tetrahedron {} is coplanar (degenerate), or lines {} and {} are coplanar, or lines {} and {} are coplanar",
                        tets[0], lines[x.0], lines[x.1], lines[y.0], lines[y.1]
                    )),
                    value: &tet_product * &v,
                });
            }
        }
        Group::D => out.push(Candidate {
            text: with_tets(format!("({} ∧ {} ∧ {})", lines[0], planes[0], planes[1])),
            statement: None,
            value: &tet_product * &scalar_meet(&[lines[0], planes[0], planes[1]])?,
        }),
        Group::C => {
            for order in planes.iter().copied().permutations(4) {
                out.push(Candidate {
                    text: order.iter().join(" ∧ "),
                    statement: None,
                    value: scalar_meet(&order)?,
                });
            }
        }
        Group::B => {
            for i in 0..3 {
                let rest: Vec<&GeometricEntity> = (0..3).filter(|&j| j != i).map(|j| lines[j]).collect();
                out.push(Candidate {
                    text: format!("({} ∧ {} ∧ {})·({} ∧ {})", lines[i], planes[0], planes[1], rest[0], rest[1]),
                    statement: Some(format!(
                        "singular iff line {} meets the intersection line of planes {} and {}, or lines {} and {} are coplanar",
                        lines[i], planes[0], planes[1], rest[0], rest[1]
                    )),
                    value: &scalar_meet(&[lines[i], planes[0], planes[1]])? * &scalar_meet(&[rest[0], rest[1]])?,
                });
            }
            for perm in (0..3).permutations(3) {
                let (la, lb, lc) = (lines[perm[0]], lines[perm[1]], lines[perm[2]]);
                for (pa, pb) in [(planes[0], planes[1]), (planes[1], planes[0])] {
                    let x = meet(&la.extensor(), &pa.extensor())?;
                    let y = meet(&lb.extensor(), &pb.extensor())?;
                    let v = meet(&join(&x, &y)?, &lc.extensor())?.as_scalar().expect("step 0");
                    out.push(Candidate {
                        text: format!("(({la} ∧ {pa}) ∨ ({lb} ∧ {pb})) ∧ {lc}"),
                        statement: Some(format!(
                            "singular iff the line through the points {la} ∩ {pa} and {lb} ∩ {pb} meets line {lc}"
                        )),
                        value: v,
                    });
                }
            }
        }
        Group::A | Group::None => {}
    }
    Ok(out)
}

/// Expands the group's join/meet expression over the entities and compares
/// it, up to a global sign, with the (unstarred) polynomial. Returns the
/// condition with `verified`, `expression` and possibly `statement` updated.
pub fn verify_condition(condition: &SingularityCondition, p: &BracketPolynomial) -> SingularityCondition {
    let mut out = condition.clone();
    if matches!(condition.group, Group::A | Group::None) {
        out.verified = Verification::NotAttempted;
        return out;
    }
    let target = unstar(p);
    let mismatch = |reason: String| {
        let mut c = condition.clone();
        c.verified = Verification::NotVerified;
        c.diagnostic = Some(reason);
        c
    };
    if (condition.count(EntityKind::Tetrahedron), condition.count(EntityKind::Plane), condition.count(EntityKind::Line))
        != condition.group.signature().expect("group has a signature")
    {
        return mismatch("entity multiset does not match the group".into());
    }
    let cands = match candidates(condition) {
        Ok(c) => c,
        Err(e) => return mismatch(e.to_string()),
    };
    for cand in cands {
        if cand.value.sign_relative_to(&target).is_some() {
            out.verified = Verification::Verified;
            out.expression = Some(cand.text);
            if let Some(s) = cand.statement {
                out.statement = s;
            }
            out.diagnostic = None;
            return out;
        }
    }
    mismatch("no join/meet expression of the entities equals the polynomial up to sign".into())
}

/// Intermediate results of the automatic identification, kept for display.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Identification {
    pub tetrahedra: Vec<GeometricEntity>,
    pub remainder: BracketPolynomial,
    pub plane_candidates: Vec<GeometricEntity>,
    pub planes: Vec<GeometricEntity>,
    pub starred: BracketPolynomial,
    pub lines: Vec<GeometricEntity>,
    pub residual: Vec<Label>,
    pub condition: SingularityCondition,
    pub candidates_tried: usize,
}

/// Automatic mode: runs every stage, enumerating the alternative plane and
/// line selections and residual completions in a fixed order, and returns
/// the first candidate that verifies (or the first one if none does).
pub fn identify(p: &BracketPolynomial) -> Identification {
    let (tetrahedra, remainder) = find_tetrahedra(p);
    if p.is_zero() {
        let condition = SingularityCondition {
            group: Group::None,
            entities: Vec::new(),
            statement: "the superbracket vanishes identically: singular in every pose".into(),
            residual: Vec::new(),
            verified: Verification::NotAttempted,
            expression: None,
            diagnostic: Some("zero polynomial".into()),
        };
        return Identification {
            tetrahedra,
            remainder: remainder.clone(),
            plane_candidates: Vec::new(),
            planes: Vec::new(),
            starred: remainder,
            lines: Vec::new(),
            residual: Vec::new(),
            condition,
            candidates_tried: 0,
        };
    }
    let plane_candidates = find_planes(&remainder);
    let mut all: Vec<Identification> = Vec::new();
    for planes in plane_packings(&remainder, &plane_candidates) {
        let planes: Vec<GeometricEntity> = planes
            .into_iter()
            .map(|mut pl| {
                pl.starred = true;
                pl
            })
            .collect();
        let base = Identification {
            tetrahedra: tetrahedra.clone(),
            remainder: remainder.clone(),
            plane_candidates: plane_candidates.clone(),
            planes: planes.clone(),
            starred: remainder.clone(),
            lines: Vec::new(),
            residual: Vec::new(),
            condition: classify(&[], &[]),
            candidates_tried: 0,
        };
        let starred = match star_relabel(&remainder, &planes) {
            Ok(s) => s,
            Err(e) => {
                let mut cond = classify(&[tetrahedra.clone(), planes.clone()].concat(), &[]);
                cond.verified = Verification::NotVerified;
                cond.diagnostic = Some(format!("{e}; use manual identification"));
                all.push(Identification { condition: cond, ..base });
                continue;
            }
        };
        let (all_lines, _) = find_line_pairs(&starred);
        let free = unstarred_labels(&starred);
        for lines in line_packings(&all_lines) {
            let used: BTreeSet<&Label> = lines.iter().flat_map(|l| &l.labels).collect();
            let residual: Vec<Label> = free.iter().filter(|l| !used.contains(l)).cloned().collect();
            let found: Vec<GeometricEntity> = [tetrahedra.clone(), planes.clone(), lines.clone()].concat();
            for (entities, rest) in resolve_residual(&found, &residual) {
                all.push(Identification {
                    starred: starred.clone(),
                    lines: lines.clone(),
                    residual: residual.clone(),
                    condition: verify_condition(&classify_resolved(entities, rest), p),
                    ..base.clone()
                });
            }
        }
    }
    // Rank so the chosen group does not depend on label names: verified
    // first, then matched groups, then by group; enumeration order breaks
    // remaining ties.
    let tried = all.len();
    let rank = |i: &Identification| {
        let c = &i.condition;
        (c.verified != Verification::Verified, c.group == Group::None, c.group)
    };
    let best = (0..all.len()).min_by_key(|&k| rank(&all[k])).expect("at least one candidate");
    let mut ident = all.swap_remove(best);
    ident.candidates_tried = tried;
    ident
}

/// Manual mode: classifies and verifies a user-asserted entity list.
pub fn identify_manual(p: &BracketPolynomial, entities: &[GeometricEntity]) -> SingularityCondition {
    let used: BTreeSet<&Label> = entities.iter().flat_map(|e| &e.labels).collect();
    let residual: Vec<Label> = unstar(p).labels().into_iter().filter(|l| !used.contains(l)).collect();
    let cond = classify_resolved(entities.to_vec(), if entities.is_empty() { residual } else { Vec::new() });
    verify_condition(&cond, p)
}
