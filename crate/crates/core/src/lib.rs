//! Symbolic and numeric singularity analysis of Gough-Stewart type parallel
//! robots in Grassmann-Cayley algebra.
//!
//! The pipeline runs from a [`robot::RobotStructure`] through the
//! 24-monomial superbracket expansion ([`superbracket`]), geometric entity
//! identification ([`identify`]) and numeric monitoring of a pose
//! ([`numeric`]). [`analysis`] ties the stages together.

pub mod algebra;
pub mod analysis;
pub mod error;
pub mod identify;
pub mod numeric;
pub mod robot;
pub mod superbracket;

pub use error::{Error, Result};
