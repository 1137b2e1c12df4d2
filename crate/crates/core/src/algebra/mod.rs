//! Bracket ring over point labels and the join/meet of extensors in
//! projective 3-space (vector dimension 4).

mod bracket;
mod extensor;
mod polynomial;

pub use bracket::{label, normalize_bracket, Bracket, Label, STAR};
pub use extensor::{join, meet, meet_all, Extensor, DIM};
pub use polynomial::{poly_add, BracketPolynomial, Monomial};
