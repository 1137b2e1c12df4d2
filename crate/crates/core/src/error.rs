use thiserror::Error;

use crate::algebra::Label;

/// Errors raised by the symbolic and numeric layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no coordinates for label `{0}`")]
    MissingLabel(Label),

    #[error("degenerate leg {0}-{1}: endpoints coincide")]
    DegenerateLeg(Label, Label),

    #[error("degenerate plane: points are collinear")]
    DegeneratePlane,

    #[error("degenerate intersection: planes are parallel")]
    DegenerateIntersection,

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("ambiguous starring of `{label}`: plane {plane} matches {count} brackets in one monomial")]
    AmbiguousStar {
        label: Label,
        plane: String,
        count: usize,
    },

    #[error("invalid robot structure: {}", .0.join("; "))]
    InvalidStructure(Vec<String>),

    #[error("failed to read robot file: {0}")]
    Io(String),

    #[error("failed to parse robot file: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
