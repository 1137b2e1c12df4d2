use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;

use super::bracket::{normalize_bracket, sort_parity, write_labels, Label};
use super::polynomial::BracketPolynomial;
use crate::error::{Error, Result};

/// Dimension of the underlying vector space (projective 3-space).
pub const DIM: usize = 4;

/// A formal sum of joins of `step` points, each with a bracket-polynomial
/// coefficient.
///
/// Terms are kept with their points sorted (sign absorbed into the
/// coefficient) and like terms merged, so two extensors compare equal iff
/// their canonical forms agree. A step-0 extensor is a scalar and carries
/// its value under the empty point list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extensor {
    step: usize,
    terms: BTreeMap<Vec<Label>, BracketPolynomial>,
}

impl Extensor {
    fn empty(step: usize) -> Self {
        Self {
            step,
            terms: BTreeMap::new(),
        }
    }

    fn push(&mut self, points: Vec<Label>, coefficient: BracketPolynomial) {
        debug_assert_eq!(points.len(), self.step);
        if coefficient.is_zero() {
            return;
        }
        let sign = sort_parity(&points);
        if sign == 0 {
            return;
        }
        let mut points = points;
        points.sort();
        let coefficient = coefficient.scale(sign);
        let slot = self.terms.entry(points.clone()).or_default();
        *slot = &*slot + &coefficient;
        if slot.is_zero() {
            self.terms.remove(&points);
        }
    }

    /// A single point (step 1).
    pub fn point(p: Label) -> Self {
        Self::join_of(&[p]).expect("one point")
    }

    /// The join `p1 ∨ p2 ∨ ...` of up to four points; zero if a point repeats.
    pub fn join_of(points: &[Label]) -> Result<Self> {
        if points.len() > DIM {
            return Err(Error::InvalidInput(format!(
                "an extensor has step at most {DIM}, got {}",
                points.len()
            )));
        }
        let mut e = Self::empty(points.len());
        e.push(points.to_vec(), BracketPolynomial::one());
        Ok(e)
    }

    /// A step-0 extensor with value `value`.
    pub fn scalar(value: BracketPolynomial) -> Self {
        let mut e = Self::empty(0);
        e.push(Vec::new(), value);
        e
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Label], &BracketPolynomial)> {
        self.terms.iter().map(|(l, c)| (l.as_slice(), c))
    }

    /// The polynomial value of a step-0 extensor.
    pub fn as_scalar(&self) -> Option<BracketPolynomial> {
        (self.step == 0).then(|| self.terms.get(&Vec::new()).cloned().unwrap_or_default())
    }

    /// A step-4 extensor rewritten as `Σ coefficient · [points]`.
    pub fn as_bracket_multiple(&self) -> Option<BracketPolynomial> {
        if self.step != DIM {
            return None;
        }
        let mut p = BracketPolynomial::zero();
        for (pts, c) in &self.terms {
            let (sign, b) = normalize_bracket(pts).expect("four points");
            if let Some(b) = b {
                p = &p + &(c * &BracketPolynomial::from_bracket(b)).scale(sign);
            }
        }
        Some(p)
    }

    pub fn scale(&self, k: &BracketPolynomial) -> Self {
        let mut e = Self::empty(self.step);
        for (pts, c) in &self.terms {
            e.push(pts.clone(), c * k);
        }
        e
    }

    /// Replaces labels in both the point lists and the coefficients.
    pub fn substitute(&self, map: impl Fn(&Label) -> Label) -> Self {
        let mut e = Self::empty(self.step);
        for (pts, c) in &self.terms {
            e.push(pts.iter().map(&map).collect(), c.substitute(&map));
        }
        e
    }
}

/// Join `A ∨ B`: concatenation of points, bilinear over terms.
pub fn join(a: &Extensor, b: &Extensor) -> Result<Extensor> {
    let step = a.step + b.step;
    if step > DIM {
        return Err(Error::InvalidInput(format!(
            "join of steps {} and {} exceeds {DIM}",
            a.step, b.step
        )));
    }
    let mut out = Extensor::empty(step);
    for (pa, ca) in &a.terms {
        for (pb, cb) in &b.terms {
            let mut pts = pa.clone();
            pts.extend(pb.iter().cloned());
            out.push(pts, ca * cb);
        }
    }
    Ok(out)
}

/// Meet `A ∧ B` for steps k + h ≥ 4.
///
/// For each term pair, sums over the splits of A's points into an ordered
/// selection of 4 − h points (bracketed together with all of B) and the
/// ordered remainder, weighted by the sign of the split. The result has
/// step k + h − 4.
pub fn meet(a: &Extensor, b: &Extensor) -> Result<Extensor> {
    let (k, h) = (a.step, b.step);
    if k + h < DIM {
        return Err(Error::InvalidInput(format!(
            "meet of steps {k} and {h} is below {DIM}"
        )));
    }
    let take = DIM - h;
    let mut out = Extensor::empty(k + h - DIM);
    for (pa, ca) in &a.terms {
        for (pb, cb) in &b.terms {
            let coeff = ca * cb;
            for chosen in (0..k).combinations(take) {
                let rest: Vec<usize> = (0..k).filter(|i| !chosen.contains(i)).collect();
                let order: Vec<usize> = chosen.iter().chain(&rest).copied().collect();
                let shuffle_sign = sort_parity(&order);
                let mut bracket_pts: Vec<Label> = chosen.iter().map(|&i| pa[i].clone()).collect();
                bracket_pts.extend(pb.iter().cloned());
                let (bsign, bracket) = normalize_bracket(&bracket_pts)?;
                let Some(bracket) = bracket else { continue };
                let factor = BracketPolynomial::from_bracket(bracket).scale(shuffle_sign * bsign);
                let remaining: Vec<Label> = rest.iter().map(|&i| pa[i].clone()).collect();
                out.push(remaining, &coeff * &factor);
            }
        }
    }
    Ok(out)
}

/// Left-associated meet of a chain: `((E1 ∧ E2) ∧ E3) ∧ ...`.
pub fn meet_all(chain: &[Extensor]) -> Result<Extensor> {
    let (first, rest) = chain
        .split_first()
        .ok_or_else(|| Error::InvalidInput("empty meet chain".into()))?;
    rest.iter().try_fold(first.clone(), |acc, e| meet(&acc, e))
}

impl fmt::Display for Extensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (pts, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if self.step == 0 {
                write!(f, "{c}")?;
                continue;
            }
            let ms = c.monomials();
            let unit = ms.len() == 1 && ms[0].brackets.is_empty() && ms[0].coefficient == 1;
            if !unit {
                write!(f, "({c})·")?;
            }
            write_labels(f, pts)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::label;

    fn ext(s: &str) -> Extensor {
        let pts: Vec<Label> = s.chars().map(|c| label(&c.to_string())).collect();
        Extensor::join_of(&pts).unwrap()
    }

    fn poly(s: &str) -> BracketPolynomial {
        BracketPolynomial::parse(s).unwrap()
    }

    #[test]
    fn join_points_gives_line() {
        let line = join(&ext("a"), &ext("b")).unwrap();
        assert_eq!(line.step(), 2);
        assert_eq!(line, ext("ab"));
    }

    #[test]
    fn join_dependent_is_zero() {
        assert!(join(&ext("a"), &ext("a")).unwrap().is_zero());
    }

    #[test]
    fn join_two_lines_gives_tetrahedron() {
        let t = join(&ext("ab"), &ext("cd")).unwrap();
        assert_eq!(t.step(), 4);
        assert_eq!(t.as_bracket_multiple().unwrap(), poly("[abcd]"));
    }

    #[test]
    fn join_overflow_is_rejected() {
        assert!(join(&ext("abc"), &ext("de")).is_err());
        assert!(Extensor::join_of(&"abcde".chars().map(|c| label(&c.to_string())).collect::<Vec<_>>()).is_err());
    }

    #[test]
    fn meet_of_two_lines() {
        let m = meet(&ext("ab"), &ext("cd")).unwrap();
        assert_eq!(m.as_scalar().unwrap(), poly("[abcd]"));
    }

    #[test]
    fn meet_of_two_planes_by_hand() {
        // k = h = 3: one point of abc goes into the bracket with def.
        // (a | b c) even, (b | a c) odd, (c | a b) even.
        let m = meet(&ext("abc"), &ext("def")).unwrap();
        assert_eq!(m.step(), 2);
        let mut expected = Extensor::empty(2);
        expected.push(vec![label("b"), label("c")], poly("[adef]"));
        expected.push(vec![label("a"), label("c")], poly("-[bdef]"));
        expected.push(vec![label("a"), label("b")], poly("[cdef]"));
        assert_eq!(m, expected);
    }

    #[test]
    fn line_and_two_planes() {
        // gh ∧ abc = [gabc] h − [habc] g, then each point meets def.
        let m = meet_all(&[ext("gh"), ext("abc"), ext("def")]).unwrap();
        assert_eq!(m.step(), 0);
        assert_eq!(m.as_scalar().unwrap(), poly("[gabc][hdef] - [habc][gdef]"));
    }

    #[test]
    fn understep_is_rejected() {
        assert!(meet(&ext("a"), &ext("bc")).is_err());
        assert!(meet_all(&[]).is_err());
    }

    #[test]
    fn scalar_meet_antisymmetry() {
        // k + h = 4 results are single brackets, so the sign rule holds formally.
        for (x, y) in [("ab", "cd"), ("a", "bcd"), ("abc", "d"), ("abcd", "")] {
            let (k, h) = (x.len(), y.len());
            let (ex, ey) = (ext(x), ext(y));
            let sign = if ((DIM - k) * (DIM - h)).is_multiple_of(2) { 1 } else { -1 };
            let lhs = meet(&ex, &ey).unwrap().as_scalar().unwrap();
            let rhs = meet(&ey, &ex).unwrap().as_scalar().unwrap();
            assert_eq!(lhs, rhs.scale(sign), "{x} ∧ {y}");
        }
    }

    #[test]
    fn meet_of_lines_matches_bracket_with_repeats() {
        let m = meet(&ext("ab"), &ext("ad")).unwrap();
        assert!(m.as_scalar().unwrap().is_zero());
    }

    #[test]
    fn four_planes_meet_to_scalar() {
        let m = meet_all(&[ext("abc"), ext("def"), ext("ghi"), ext("jkl")]).unwrap();
        let p = m.as_scalar().unwrap();
        assert!(!p.is_zero());
        assert_eq!(p.degree(), 3);
        // Each monomial uses every point exactly once.
        for mono in p.monomials() {
            let mut pts: Vec<_> = mono.brackets.iter().flat_map(|b| b.points().iter().cloned()).collect();
            pts.sort();
            pts.dedup();
            assert_eq!(pts.len(), 12);
        }
    }

    #[test]
    fn display() {
        let m = meet(&ext("abc"), &ext("def")).unwrap();
        assert_eq!(m.to_string(), "([cdef])·ab + (-[bdef])·ac + ([adef])·bc");
        assert_eq!(ext("ab").to_string(), "ab");
    }
}
