//! The superbracket `[[L1, ..., L6]]` of six lines, i.e. the coordinate-free
//! Jacobian determinant of a robot driven by six pure forces.
//!
//! Expansion goes through a fixed 24-monomial template over the generic leg
//! endpoints `ab, cd, ef, gh, ij, kl`. Its brackets are written with points
//! in lexicographic order, which is what makes monomials of reduced
//! structures easy to compare.

use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::algebra::{normalize_bracket, BracketPolynomial, Label, Monomial};
use crate::error::{Error, Result};

/// Generic template labels, two per leg slot.
pub const TEMPLATE_LABELS: [char; 12] = ['a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', 'i', 'j', 'k', 'l'];

/// The 24 signed monomials of `[[ab, cd, ef, gh, ij, kl]]`.
pub const TEMPLATE: [(i64, [&str; 3]); 24] = [
    (-1, ["abcd", "efgi", "hjkl"]),
    (1, ["abcd", "efhi", "gjkl"]),
    (1, ["abcd", "efgj", "hikl"]),
    (-1, ["abcd", "efhj", "gikl"]),
    (1, ["abce", "dfgh", "ijkl"]),
    (-1, ["abde", "cfgh", "ijkl"]),
    (-1, ["abcf", "degh", "ijkl"]),
    (1, ["abdf", "cegh", "ijkl"]),
    (-1, ["abce", "dghi", "fjkl"]),
    (1, ["abde", "cghi", "fjkl"]),
    (1, ["abcf", "dghi", "ejkl"]),
    (1, ["abce", "dghj", "fikl"]),
    (-1, ["abdf", "cghi", "ejkl"]),
    (-1, ["abde", "cghj", "fikl"]),
    (-1, ["abcf", "dghj", "eikl"]),
    (1, ["abdf", "cghj", "eikl"]),
    (1, ["abcg", "defi", "hjkl"]),
    (-1, ["abdg", "cefi", "hjkl"]),
    (-1, ["abch", "defi", "gjkl"]),
    (-1, ["abcg", "defj", "hikl"]),
    (1, ["abdh", "cefi", "gjkl"]),
    (1, ["abdg", "cefj", "hikl"]),
    (1, ["abch", "defj", "gikl"]),
    (-1, ["abdh", "cefj", "gikl"]),
];

/// Threshold above which the automatic shortest-form search is suggested.
pub const AUTO_REDUCE_THRESHOLD: usize = 4;

/// A leg as a 2-extensor from its base endpoint to its platform endpoint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "(Label, Label)", into = "(Label, Label)")]
pub struct Leg {
    base: Label,
    platform: Label,
}

impl Leg {
    pub fn new(base: Label, platform: Label) -> Result<Self> {
        if base == platform {
            return Err(Error::InvalidInput(format!(
                "leg endpoints must differ, got `{base}` twice"
            )));
        }
        Ok(Self { base, platform })
    }

    pub fn base(&self) -> &Label {
        &self.base
    }

    pub fn platform(&self) -> &Label {
        &self.platform
    }

    pub fn reversed(&self) -> Self {
        Self {
            base: self.platform.clone(),
            platform: self.base.clone(),
        }
    }

    pub fn endpoints(&self) -> [&Label; 2] {
        [&self.base, &self.platform]
    }
}

impl TryFrom<(Label, Label)> for Leg {
    type Error = Error;

    fn try_from((b, p): (Label, Label)) -> Result<Self> {
        Leg::new(b, p)
    }
}

impl From<Leg> for (Label, Label) {
    fn from(leg: Leg) -> Self {
        (leg.base, leg.platform)
    }
}

impl fmt::Display for Leg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let compact = self.base.as_str().len() == 1 && self.platform.as_str().len() == 1;
        if compact {
            write!(f, "{}{}", self.base, self.platform)
        } else {
            write!(f, "{} {}", self.base, self.platform)
        }
    }
}

/// Six legs in the order they fill the template slots.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LegOrder(pub [Leg; 6]);

impl LegOrder {
    pub fn new(legs: Vec<Leg>) -> Result<Self> {
        let n = legs.len();
        legs.try_into()
            .map(Self)
            .map_err(|_| Error::InvalidInput(format!("a leg order has 6 legs, got {n}")))
    }

    /// Parses `ab,af,cb,...` with single-character labels.
    pub fn parse_compact(text: &str) -> Result<Self> {
        let legs = text
            .split(',')
            .map(|s| {
                let chars: Vec<char> = s.trim().chars().collect();
                if chars.len() != 2 {
                    return Err(Error::InvalidInput(format!("bad leg `{s}`")));
                }
                Leg::new(Label::new(chars[0].to_string())?, Label::new(chars[1].to_string())?)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(legs)
    }

    pub fn legs(&self) -> &[Leg; 6] {
        &self.0
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self(std::array::from_fn(|i| self.0[perm[i]].clone()))
    }

    /// The label filling template character `c`.
    fn slot(&self, c: char) -> &Label {
        let idx = TEMPLATE_LABELS.iter().position(|&t| t == c).expect("template label");
        let leg = &self.0[idx / 2];
        if idx % 2 == 0 {
            &leg.base
        } else {
            &leg.platform
        }
    }
}

impl fmt::Display for LegOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}]]", self.0.iter().join(", "))
    }
}

/// A template monomial after substitution, before any reordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawMonomial {
    pub sign: i64,
    pub brackets: Vec<[Label; 4]>,
}

impl fmt::Display for RawMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.sign < 0 { "-" } else { "+" })?;
        for b in &self.brackets {
            let compact = b.iter().all(|l| l.as_str().chars().count() == 1);
            write!(f, "[{}]", b.iter().join(if compact { "" } else { " " }))?;
        }
        Ok(())
    }
}

fn instantiate(order: &LegOrder, pattern: &str) -> [Label; 4] {
    let v: Vec<Label> = pattern.chars().map(|c| order.slot(c).clone()).collect();
    v.try_into().expect("four points")
}

/// Template monomials with the legs substituted in, in template order,
/// keeping only those whose brackets have no repeated point. Point order
/// inside each bracket is left as substituted and like monomials are not
/// merged.
pub fn instantiate_superbracket(order: &LegOrder) -> Vec<RawMonomial> {
    TEMPLATE
        .iter()
        .filter_map(|(sign, patterns)| {
            let brackets: Vec<[Label; 4]> = patterns.iter().map(|p| instantiate(order, p)).collect();
            let vanishes = brackets
                .iter()
                .any(|b| normalize_bracket(b).expect("four points").1.is_none());
            (!vanishes).then_some(RawMonomial { sign: *sign, brackets })
        })
        .collect()
}

/// Canonical expansion of `[[L1, ..., L6]]`: template substitution with
/// vanishing brackets dropped and like monomials merged.
pub fn expand_superbracket(order: &LegOrder) -> BracketPolynomial {
    BracketPolynomial::from_monomials(TEMPLATE.iter().filter_map(|(sign, patterns)| {
        let pts: Vec<Vec<Label>> = patterns.iter().map(|p| instantiate(order, p).to_vec()).collect();
        Monomial::from_points(*sign, &pts).expect("four points")
    }))
}

/// The template over the generic labels `a..l`.
pub fn template_polynomial() -> BracketPolynomial {
    expand_superbracket(&generic_order())
}

/// `ab, cd, ef, gh, ij, kl`.
pub fn generic_order() -> LegOrder {
    LegOrder::parse_compact("ab,cd,ef,gh,ij,kl").expect("generic legs")
}

pub fn monomial_count(p: &BracketPolynomial) -> usize {
    p.monomial_count()
}

/// Whether the expansion is long enough that the shortest-form search
/// should be offered.
pub fn suggest_auto_reduce(p: &BracketPolynomial) -> bool {
    monomial_count(p) > AUTO_REDUCE_THRESHOLD
}

/// Result of [`shortest_form_search`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortestForm {
    pub order: LegOrder,
    pub polynomial: BracketPolynomial,
    /// Index of the winning permutation in lexicographic enumeration.
    pub permutation_index: usize,
    pub orders_tried: usize,
}

/// Expands all 720 orderings of `legs` (lexicographic in leg positions,
/// identity first, endpoint orientation kept) and returns the first one with
/// the fewest monomials.
pub fn shortest_form_search(legs: &LegOrder) -> ShortestForm {
    let mut best: Option<ShortestForm> = None;
    let mut tried = 0;
    for (idx, perm) in (0..6).permutations(6).enumerate() {
        tried += 1;
        let order = legs.permuted(&perm);
        let polynomial = expand_superbracket(&order);
        let better = best
            .as_ref()
            .is_none_or(|b| polynomial.monomial_count() < b.polynomial.monomial_count());
        if better {
            best = Some(ShortestForm {
                order,
                polynomial,
                permutation_index: idx,
                orders_tried: 0,
            });
        }
    }
    let mut best = best.expect("720 orders");
    best.orders_tried = tried;
    best
}
