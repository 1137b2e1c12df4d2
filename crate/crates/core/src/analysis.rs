//! End-to-end analysis of a robot structure: expansion, optional reduction
//! by leg reordering, entity identification, verification, and evaluation
//! at a pose.
//!
//! Every stage is logged so front ends can show the whole procedure.

use serde::{Deserialize, Serialize};

use crate::algebra::{BracketPolynomial, Label};
use crate::error::{Error, Result};
use crate::identify::{identify, identify_manual, EntityKind, GeometricEntity, SingularityCondition};
use crate::numeric::{singularity_report, Coordinates, Pose, SingularityReport};
use crate::robot::{RobotKind, RobotStructure, StructureClass};
use crate::superbracket::{expand_superbracket, shortest_form_search, suggest_auto_reduce, LegOrder};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnalyzeOptions {
    /// Run the reordering search even when the expansion is short.
    pub auto_reduce: bool,
    /// User-asserted entities; skips the automatic search.
    pub manual: Option<Vec<GeometricEntity>>,
}

/// Manual identification input: `{"entities": [{"kind": "plane", "labels": ["a","b","c"]}, ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManualEntities {
    pub entities: Vec<GeometricEntity>,
}

impl ManualEntities {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        // Re-normalize through the checked constructor.
        let entities = raw
            .entities
            .into_iter()
            .map(|e| GeometricEntity::new(e.kind, e.labels))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entities })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub stage: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisResult {
    pub name: String,
    pub kind: RobotKind,
    pub class: StructureClass,
    pub leg_order: LegOrder,
    pub initial_monomials: usize,
    pub auto_reduce_suggested: bool,
    pub auto_reduced: bool,
    /// Index of the chosen leg permutation when the search ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation_index: Option<usize>,
    pub polynomial: String,
    pub monomial_count: usize,
    pub condition: SingularityCondition,
    /// Evaluation at the home (identity) pose.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<SingularityReport>,
    pub stages: Vec<Stage>,
}

/// An analysis together with the structure and reduced polynomial it
/// came from, ready for repeated pose evaluation.
#[derive(Debug, Clone)]
pub struct Session {
    pub structure: RobotStructure,
    pub polynomial: BracketPolynomial,
    pub result: AnalysisResult,
}

pub fn analyze(structure: &RobotStructure, options: &AnalyzeOptions) -> Result<Session> {
    let mut stages = Vec::new();
    let mut log = |stage: &str, detail: String| {
        stages.push(Stage {
            stage: stage.into(),
            detail,
        })
    };
    let order = structure.leg_order()?;
    let class = structure.classify();
    log(
        "structure",
        format!("{} ({}), legs {order}", class.signature, kind_name(structure.kind)),
    );

    let expanded = expand_superbracket(&order);
    let initial_monomials = expanded.monomial_count();
    log("expand", format!("{}: {expanded}", count_text(initial_monomials)));

    let suggested = suggest_auto_reduce(&expanded);
    let (order, polynomial, permutation_index) = if suggested || options.auto_reduce {
        let best = shortest_form_search(&order);
        log(
            "reduce",
            format!(
                "{} orders tried; shortest has {} at permutation {}: {}",
                best.orders_tried,
                count_text(best.polynomial.monomial_count()),
                best.permutation_index,
                best.order
            ),
        );
        (best.order, best.polynomial, Some(best.permutation_index))
    } else {
        (order, expanded, None)
    };
    log(
        "polynomial",
        format!("{}: {polynomial}", count_text(polynomial.monomial_count())),
    );

    let condition = match &options.manual {
        Some(entities) => {
            log("identify", format!("manual entities: {}", entity_list(entities)));
            identify_manual(&polynomial, entities)
        }
        None => {
            let ident = identify(&polynomial);
            log("tetrahedra", entity_list(&ident.tetrahedra));
            log("remainder", ident.remainder.to_string());
            log("plane candidates", entity_list(&ident.plane_candidates));
            log("planes", entity_list(&ident.planes));
            log("starred", ident.starred.to_string());
            log("lines", entity_list(&ident.lines));
            log("residual", ident.residual.iter().map(Label::to_string).collect::<Vec<_>>().join(" "));
            ident.condition
        }
    };
    log(
        "condition",
        format!("group {}: {}", condition.group, condition.statement),
    );
    log(
        "verify",
        match &condition.expression {
            Some(e) => format!("{}: {e}", condition.verified),
            None => condition.verified.to_string(),
        },
    );

    let report = match singularity_report(
        &polynomial,
        &structure.coordinates_at(&Pose::identity()),
        crate::numeric::DEFAULT_EPSILON,
        Some(&condition),
    ) {
        Ok(r) => Some(r),
        Err(e) => {
            log("evaluate", format!("home pose not evaluated: {e}"));
            None
        }
    };

    let result = AnalysisResult {
        name: structure.name.clone(),
        kind: structure.kind,
        class,
        leg_order: order,
        initial_monomials,
        auto_reduce_suggested: suggested,
        auto_reduced: permutation_index.is_some(),
        permutation_index,
        polynomial: polynomial.to_string(),
        monomial_count: polynomial.monomial_count(),
        condition,
        report,
        stages,
    };
    Ok(Session {
        structure: structure.clone(),
        polynomial,
        result,
    })
}

fn count_text(n: usize) -> String {
    format!("{n} monomial{}", if n == 1 { "" } else { "s" })
}

fn kind_name(kind: RobotKind) -> &'static str {
    match kind {
        RobotKind::Gsp => "gsp",
        RobotKind::EquivalentScrews => "equivalent-screws",
    }
}

fn entity_list(es: &[GeometricEntity]) -> String {
    if es.is_empty() {
        return "none".into();
    }
    es.iter().map(GeometricEntity::name).collect::<Vec<_>>().join(", ")
}

impl Session {
    pub fn coordinates(&self, pose: &Pose) -> Coordinates {
        self.structure.coordinates_at(pose)
    }

    pub fn evaluate(&self, pose: &Pose, epsilon: f64) -> Result<SingularityReport> {
        singularity_report(&self.polynomial, &self.coordinates(pose), epsilon, Some(&self.result.condition))
    }

    /// Entities and legs with world coordinates, for rendering.
    pub fn entities(&self, pose: &Pose) -> EntitiesView {
        let coords = self.coordinates(pose);
        let xyz = |l: &Label| coords.get(l).map(|p| [p.x, p.y, p.z]);
        let view = |labels: &[Label]| labels.iter().filter_map(xyz).collect::<Vec<_>>();
        EntitiesView {
            entities: self
                .result
                .condition
                .entities
                .iter()
                .map(|e| EntityView {
                    kind: e.kind,
                    labels: e.labels.clone(),
                    points: view(&e.labels),
                })
                .collect(),
            legs: self
                .result
                .leg_order
                .legs()
                .iter()
                .map(|leg| {
                    let labels = vec![leg.base().clone(), leg.platform().clone()];
                    EntityView {
                        kind: EntityKind::Line,
                        points: view(&labels),
                        labels,
                    }
                })
                .collect(),
            anchors: coords.iter().map(|(l, p)| (l.clone(), [p.x, p.y, p.z])).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityView {
    pub kind: EntityKind,
    pub labels: Vec<Label>,
    pub points: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntitiesView {
    pub entities: Vec<EntityView>,
    pub legs: Vec<EntityView>,
    pub anchors: std::collections::BTreeMap<Label, [f64; 3]>,
}

/// Deterministic JSON rendering shared by every front end.
pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

/// Human-readable rendering of an analysis.
pub fn to_text(result: &AnalysisResult) -> String {
    let mut out = format!("{}\n", result.name);
    for s in &result.stages {
        out.push_str(&format!("  {:<17} {}\n", format!("{}:", s.stage), s.detail));
    }
    if let Some(r) = &result.report {
        out.push_str(&format!(
            "  {:<17} raw {:.6e}, measure {:.6e}{}\n",
            "home pose:",
            r.raw_value,
            r.normalized_measure,
            if r.near_singular { " (near singular)" } else { "" }
        ));
    }
    out
}
