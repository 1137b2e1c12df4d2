use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::bracket::{normalize_bracket, Bracket, Label};
use crate::error::{Error, Result};

/// A signed product of canonical brackets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub coefficient: i64,
    /// Sorted multiset of brackets.
    pub brackets: Vec<Bracket>,
}

impl Monomial {
    /// Canonicalizes a product of (possibly unsorted) 4-point sequences.
    /// Returns `None` when any bracket has a repeated point.
    pub fn from_points(coefficient: i64, brackets: &[Vec<Label>]) -> Result<Option<Self>> {
        let mut sign = coefficient;
        let mut out = Vec::with_capacity(brackets.len());
        for pts in brackets {
            match normalize_bracket(pts)? {
                (s, Some(b)) => {
                    sign *= s;
                    out.push(b);
                }
                _ => return Ok(None),
            }
        }
        if sign == 0 {
            return Ok(None);
        }
        out.sort();
        Ok(Some(Self {
            coefficient: sign,
            brackets: out,
        }))
    }

    pub fn degree(&self) -> usize {
        self.brackets.len()
    }
}

/// Sum of bracket monomials in canonical form.
///
/// No two stored monomials share a bracket multiset and no coefficient is
/// zero, so structural equality is equality of canonical forms. The empty
/// polynomial is 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BracketPolynomial {
    terms: BTreeMap<Vec<Bracket>, i64>,
}

impl BracketPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The constant 1 (a monomial with no brackets).
    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn from_bracket(b: Bracket) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![b], 1);
        p
    }

    pub fn from_monomials(monomials: impl IntoIterator<Item = Monomial>) -> Self {
        let mut p = Self::zero();
        for m in monomials {
            p.add_term(m.brackets, m.coefficient);
        }
        p
    }

    fn add_term(&mut self, mut brackets: Vec<Bracket>, c: i64) {
        if c == 0 {
            return;
        }
        brackets.sort();
        let entry = self.terms.entry(brackets);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn monomial_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Bracket], i64)> {
        self.terms.iter().map(|(b, &c)| (b.as_slice(), c))
    }

    pub fn monomials(&self) -> Vec<Monomial> {
        self.terms
            .iter()
            .map(|(b, &c)| Monomial {
                coefficient: c,
                brackets: b.clone(),
            })
            .collect()
    }

    /// Every point label that occurs in some bracket.
    pub fn labels(&self) -> BTreeSet<Label> {
        self.terms
            .keys()
            .flatten()
            .flat_map(|b| b.points().iter().cloned())
            .collect()
    }

    /// Largest number of brackets in any monomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut p = Self::zero();
        for (b, &c) in &self.terms {
            p.add_term(b.clone(), c * k);
        }
        p
    }

    /// Replaces every label through `map`, renormalizing brackets and merging
    /// like monomials. Brackets that acquire a repeated label vanish.
    pub fn substitute(&self, map: impl Fn(&Label) -> Label) -> Self {
        let mut p = Self::zero();
        for (brackets, &c) in &self.terms {
            let pts: Vec<Vec<Label>> = brackets
                .iter()
                .map(|b| b.points().iter().map(&map).collect())
                .collect();
            if let Some(m) = Monomial::from_points(c, &pts).expect("arity preserved") {
                p.add_term(m.brackets, m.coefficient);
            }
        }
        p
    }

    /// `substitute` driven by a lookup table; labels absent from the table
    /// map to themselves.
    pub fn substitute_labels(&self, map: &BTreeMap<Label, Label>) -> Self {
        self.substitute(|l| map.get(l).cloned().unwrap_or_else(|| l.clone()))
    }

    /// Exchanges every appearance of `x` and `y`.
    pub fn swap_labels(&self, x: &Label, y: &Label) -> Self {
        self.substitute(|l| {
            if l == x {
                y.clone()
            } else if l == y {
                x.clone()
            } else {
                l.clone()
            }
        })
    }

    /// Interchangeability test `P(x,y,..) + P(y,x,..) = 0`, decided on
    /// canonical forms without syzygy rewriting.
    pub fn swap_interchange_test(&self, x: &Label, y: &Label) -> Result<bool> {
        if x == y {
            return Err(Error::InvalidInput(format!(
                "swap test needs two distinct labels, got `{x}` twice"
            )));
        }
        Ok((self + &self.swap_labels(x, y)).is_zero())
    }

    /// If `other = s * self` for `s` in {+1, -1}, returns `s`.
    pub fn sign_relative_to(&self, other: &Self) -> Option<i64> {
        if self == other {
            Some(1)
        } else if *self == -other {
            Some(-1)
        } else {
            None
        }
    }

    /// Removes one copy of `b` from every monomial. Returns `None` unless
    /// every monomial contains `b`.
    pub fn divide_by_bracket(&self, b: &Bracket) -> Option<Self> {
        let mut p = Self::zero();
        for (brackets, &c) in &self.terms {
            let pos = brackets.iter().position(|x| x == b)?;
            let mut rest = brackets.clone();
            rest.remove(pos);
            p.add_term(rest, c);
        }
        Some(p)
    }

    /// Parses bracket notation such as `-[abcd][efgi][hjkl] + 2[abce][dfgh][ijkl]`.
    ///
    /// Inside a bracket, points are separated by spaces or commas when any
    /// separator is present (`[S1 A1 B1 C1]`); otherwise each character is one
    /// point. `0` parses as the zero polynomial.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Self::zero();
        let text = text.trim();
        if text == "0" || text.is_empty() {
            return Ok(p);
        }
        let mut chars = text.chars().peekable();
        let bad = |msg: &str| Error::InvalidInput(format!("{msg} in `{text}`"));
        loop {
            while chars.peek().is_some_and(|c| c.is_whitespace()) {
                chars.next();
            }
            if chars.peek().is_none() {
                break;
            }
            let mut sign = 1;
            if let Some(&c) = chars.peek() {
                if c == '+' || c == '-' {
                    if c == '-' {
                        sign = -1;
                    }
                    chars.next();
                }
            }
            while chars.peek().is_some_and(|c| c.is_whitespace()) {
                chars.next();
            }
            let mut digits = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    digits.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            let magnitude: i64 = if digits.is_empty() {
                1
            } else {
                digits.parse().map_err(|_| bad("bad coefficient"))?
            };
            while chars.peek().is_some_and(|c| c.is_whitespace() || *c == '*' || *c == '·') {
                chars.next();
            }
            let mut brackets = Vec::new();
            while chars.peek() == Some(&'[') {
                chars.next();
                let mut body = String::new();
                loop {
                    match chars.next() {
                        Some(']') => break,
                        Some(c) => body.push(c),
                        None => return Err(bad("unterminated bracket")),
                    }
                }
                let pts: Vec<Label> = if body.contains([' ', ',']) {
                    body.split([' ', ','])
                        .filter(|s| !s.is_empty())
                        .map(Label::new)
                        .collect::<Result<_>>()?
                } else {
                    body.chars()
                        .map(|c| Label::new(c.to_string()))
                        .collect::<Result<_>>()?
                };
                brackets.push(pts);
                while chars.peek().is_some_and(|c| c.is_whitespace()) {
                    chars.next();
                }
            }
            if brackets.is_empty() && digits.is_empty() {
                return Err(bad("expected a bracket or coefficient"));
            }
            if let Some(m) = Monomial::from_points(sign * magnitude, &brackets)? {
                p.add_term(m.brackets, m.coefficient);
            }
            match chars.peek() {
                None | Some('+') | Some('-') => {}
                Some(_) => return Err(bad("unexpected character")),
            }
        }
        Ok(p)
    }
}

impl fmt::Display for BracketPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (brackets, &c)) in self.terms.iter().enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            if i == 0 {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if c.abs() != 1 || brackets.is_empty() {
                write!(f, "{}", c.abs())?;
            }
            for b in brackets {
                write!(f, "{b}")?;
            }
        }
        Ok(())
    }
}

impl Add for &BracketPolynomial {
    type Output = BracketPolynomial;

    fn add(self, rhs: &BracketPolynomial) -> BracketPolynomial {
        let mut p = self.clone();
        for (b, &c) in &rhs.terms {
            p.add_term(b.clone(), c);
        }
        p
    }
}

impl Add for BracketPolynomial {
    type Output = BracketPolynomial;

    fn add(self, rhs: BracketPolynomial) -> BracketPolynomial {
        &self + &rhs
    }
}

impl Sub for &BracketPolynomial {
    type Output = BracketPolynomial;

    fn sub(self, rhs: &BracketPolynomial) -> BracketPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &BracketPolynomial {
    type Output = BracketPolynomial;

    fn neg(self) -> BracketPolynomial {
        self.scale(-1)
    }
}

impl Neg for BracketPolynomial {
    type Output = BracketPolynomial;

    fn neg(self) -> BracketPolynomial {
        self.scale(-1)
    }
}

impl Mul for &BracketPolynomial {
    type Output = BracketPolynomial;

    fn mul(self, rhs: &BracketPolynomial) -> BracketPolynomial {
        let mut p = BracketPolynomial::zero();
        for (b1, &c1) in &self.terms {
            for (b2, &c2) in &rhs.terms {
                let mut brackets = b1.clone();
                brackets.extend(b2.iter().cloned());
                p.add_term(brackets, c1 * c2);
            }
        }
        p
    }
}

impl Mul for BracketPolynomial {
    type Output = BracketPolynomial;

    fn mul(self, rhs: BracketPolynomial) -> BracketPolynomial {
        &self * &rhs
    }
}

/// `poly_add`: sum with cancellation of like monomials.
pub fn poly_add(p: &BracketPolynomial, q: &BracketPolynomial) -> BracketPolynomial {
    p + q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::label;

    fn poly(s: &str) -> BracketPolynomial {
        BracketPolynomial::parse(s).unwrap()
    }

    #[test]
    fn cancellation() {
        let p = poly("[abcd][efgh][ijkl]");
        assert!(poly_add(&p, &poly("-[abcd][efgh][ijkl]")).is_zero());
    }

    #[test]
    fn zero_is_identity() {
        let p = poly("[abcd][efgh][ijkl] - [abce][dfgh][ijkl]");
        assert_eq!(poly_add(&p, &BracketPolynomial::zero()), p);
    }

    #[test]
    fn antisymmetric_inputs_cancel_after_normalization() {
        let sum = poly_add(&poly("[bacd][efgh][ijkl]"), &poly("[abcd][efgh][ijkl]"));
        assert!(sum.is_zero());
    }

    #[test]
    fn substitution_kills_repeated_brackets() {
        let p = poly("[abcd][efgi][hjkl]");
        let q = p.substitute(|l| if l.as_str() == "c" { label("a") } else { l.clone() });
        assert!(q.is_zero());
    }

    #[test]
    fn identity_substitution_is_noop() {
        let p = poly("[abcd][efgi][hjkl] + [abce][dfgh][ijkl]");
        assert_eq!(p.substitute(Label::clone), p);
        assert_eq!(p.substitute_labels(&BTreeMap::new()), p);
    }

    #[test]
    fn substitution_merges_like_monomials() {
        // x -> c turns the second monomial into a copy of the first.
        let p = poly("[abcd] + [abxd]");
        let q = p.substitute(|l| if l.as_str() == "x" { label("c") } else { l.clone() });
        assert_eq!(q, poly("2[abcd]"));
    }

    #[test]
    fn swap_in_one_bracket_flips_sign() {
        let p = poly("[abcd][efgh][ijkl]");
        assert!(p.swap_interchange_test(&label("a"), &label("b")).unwrap());
    }

    #[test]
    fn swap_across_brackets_does_not_cancel() {
        // Brute-force canonical form of the swapped sum: e <-> f maps
        // [abce][abdf] to [abcf][abde], a different monomial, so nothing cancels.
        let p = poly("[abce][abdf][ghij]");
        let swapped = p.swap_labels(&label("e"), &label("f"));
        assert_eq!(swapped, poly("[abcf][abde][ghij]"));
        assert!(!p.swap_interchange_test(&label("e"), &label("f")).unwrap());
    }

    #[test]
    fn swap_test_rejects_equal_labels() {
        let p = poly("[abcd]");
        assert!(p.swap_interchange_test(&label("a"), &label("a")).is_err());
    }

    #[test]
    fn parse_and_display() {
        let p = poly("-[abcd][efgi][hjkl] + [abcd][efhi][gjkl]");
        assert_eq!(p.to_string(), "-[abcd][efgi][hjkl] + [abcd][efhi][gjkl]");
        let q = poly("[S1 A1 B1 C1][S1,S3,A3,B3]");
        // [S1 A1 B1 C1] sorts by an odd permutation, [S1 S3 A3 B3] by an even one.
        assert_eq!(q.to_string(), "-[A1 B1 C1 S1][A3 B3 S1 S3]");
        assert_eq!(BracketPolynomial::parse("0").unwrap(), BracketPolynomial::zero());
        assert_eq!(BracketPolynomial::one().to_string(), "1");
        assert!(BracketPolynomial::parse("[abc]").is_err());
        assert!(BracketPolynomial::parse("[abcd").is_err());
        assert!(BracketPolynomial::parse("[abcd] x").is_err());
    }

    #[test]
    fn product_and_division() {
        let p = poly("[abcd]") * poly("[efgh] - [efgi]");
        assert_eq!(p, poly("[abcd][efgh] - [abcd][efgi]"));
        let (_, b) = normalize_bracket(&[label("a"), label("b"), label("c"), label("d")]).unwrap();
        assert_eq!(p.divide_by_bracket(&b.unwrap()), Some(poly("[efgh] - [efgi]")));
        let (_, e) = normalize_bracket(&[label("e"), label("f"), label("g"), label("h")]).unwrap();
        assert_eq!(p.divide_by_bracket(&e.unwrap()), None);
    }

    #[test]
    fn relative_sign() {
        let p = poly("[abcd][efgh] - [abce][dfgh]");
        assert_eq!(p.sign_relative_to(&-&p), Some(-1));
        assert_eq!(p.sign_relative_to(&p), Some(1));
        assert_eq!(p.sign_relative_to(&poly("[abcd][efgh]")), None);
    }
}
