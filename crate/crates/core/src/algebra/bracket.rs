use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Suffix marking a starred occurrence of a point (`a -> a*`).
pub const STAR: char = '*';

/// Symbolic name of a projective point.
///
/// Ordering is lexicographic on the name and defines every canonical form in
/// the crate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Label(String);

impl Label {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidInput("empty label".into()));
        }
        if name.chars().any(|c| c.is_whitespace() || "[](),".contains(c)) {
            return Err(Error::InvalidInput(format!(
                "label `{name}` contains a reserved character"
            )));
        }
        Ok(Self(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_starred(&self) -> bool {
        self.0.ends_with(STAR)
    }

    pub fn starred(&self) -> Self {
        if self.is_starred() {
            self.clone()
        } else {
            Self(format!("{}{STAR}", self.0))
        }
    }

    pub fn unstarred(&self) -> Self {
        Self(self.0.trim_end_matches(STAR).to_string())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for Label {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        Label::new(value)
    }
}

impl TryFrom<&str> for Label {
    type Error = Error;

    fn try_from(value: &str) -> Result<Self> {
        Label::new(value)
    }
}

impl From<Label> for String {
    fn from(value: Label) -> Self {
        value.0
    }
}

/// Shorthand used throughout tests and fixtures. Panics on an invalid name.
pub fn label(name: &str) -> Label {
    Label::new(name).expect("valid label")
}

/// Parity of the permutation that sorts `items`: `+1` even, `-1` odd.
/// Returns 0 when two items compare equal.
pub(crate) fn sort_parity<T: Ord>(items: &[T]) -> i64 {
    let mut sign = 1;
    for i in 0..items.len() {
        for j in (i + 1)..items.len() {
            match items[i].cmp(&items[j]) {
                std::cmp::Ordering::Greater => sign = -sign,
                std::cmp::Ordering::Equal => return 0,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    sign
}

/// A 4-bracket `[abcd]` in canonical (ascending) order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bracket([Label; 4]);

impl Bracket {
    pub fn points(&self) -> &[Label; 4] {
        &self.0
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.0.contains(l)
    }

    pub fn contains_all<'a>(&self, labels: impl IntoIterator<Item = &'a Label>) -> bool {
        labels.into_iter().all(|l| self.contains(l))
    }
}

/// Sorts four points into a canonical bracket.
///
/// The sign is the parity of the sorting permutation; a repeated point gives
/// sign 0 and no bracket.
pub fn normalize_bracket(points: &[Label]) -> Result<(i64, Option<Bracket>)> {
    let points: [Label; 4] = points.to_vec().try_into().map_err(|v: Vec<Label>| {
        Error::InvalidInput(format!("a bracket takes 4 points, got {}", v.len()))
    })?;
    let sign = sort_parity(&points);
    if sign == 0 {
        return Ok((0, None));
    }
    let mut sorted = points;
    sorted.sort();
    Ok((sign, Some(Bracket(sorted))))
}

/// Writes a run of labels the way brackets are displayed: concatenated when
/// every name is a single character, space separated otherwise.
pub(crate) fn write_labels(f: &mut impl fmt::Write, labels: &[Label]) -> fmt::Result {
    let compact = labels.iter().all(|l| l.as_str().chars().count() == 1);
    for (i, l) in labels.iter().enumerate() {
        if i > 0 && !compact {
            f.write_char(' ')?;
        }
        f.write_str(l.as_str())?;
    }
    Ok(())
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        write_labels(f, &self.0)?;
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn labels(s: &str) -> Vec<Label> {
        s.chars().map(|c| label(&c.to_string())).collect()
    }

    #[test]
    fn single_transposition_is_odd() {
        let (sign, b) = normalize_bracket(&labels("bacd")).unwrap();
        assert_eq!(sign, -1);
        assert_eq!(b.unwrap().to_string(), "[abcd]");
    }

    #[test]
    fn repeated_point_vanishes() {
        assert_eq!(normalize_bracket(&labels("abad")).unwrap(), (0, None));
    }

    #[test]
    fn reversal_is_even() {
        let (sign, b) = normalize_bracket(&labels("dcba")).unwrap();
        assert_eq!(sign, 1);
        assert_eq!(b.unwrap().to_string(), "[abcd]");
    }

    #[test]
    fn wrong_arity_is_rejected() {
        assert!(matches!(
            normalize_bracket(&labels("abc")),
            Err(Error::InvalidInput(_))
        ));
        assert!(normalize_bracket(&labels("abcde")).is_err());
    }

    // Parity by cycle decomposition, independent of the inversion count.
    fn cycle_parity(perm: &[usize]) -> i64 {
        let mut seen = vec![false; perm.len()];
        let mut sign = 1;
        for start in 0..perm.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = perm[i];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }

    #[test]
    fn sign_is_permutation_parity_for_all_orderings() {
        let base = labels("abcd");
        for perm in (0..4).permutations(4) {
            let pts: Vec<Label> = perm.iter().map(|&i| base[i].clone()).collect();
            let (sign, b) = normalize_bracket(&pts).unwrap();
            assert_eq!(sign, cycle_parity(&perm), "{perm:?}");
            assert_eq!(b.unwrap().points().as_slice(), base.as_slice());
        }
    }

    #[test]
    fn star_round_trip() {
        let a = label("S1");
        assert_eq!(a.starred().as_str(), "S1*");
        assert!(a.starred().is_starred());
        assert_eq!(a.starred().unstarred(), a);
        assert_eq!(a.starred().starred(), a.starred());
    }

    #[test]
    fn multi_char_labels_display_spaced() {
        let pts: Vec<Label> = ["S1", "A1", "B1", "C1"].iter().map(|s| label(s)).collect();
        let (_, b) = normalize_bracket(&pts).unwrap();
        assert_eq!(b.unwrap().to_string(), "[A1 B1 C1 S1]");
    }

    #[test]
    fn labels_reject_reserved_characters() {
        assert!(Label::new("").is_err());
        assert!(Label::new("a b").is_err());
        assert!(Label::new("[a").is_err());
    }
}
