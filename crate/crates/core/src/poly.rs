//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! A `MultiPoly` is a finite map from exponent vectors to nonzero
//! scalars. Invariants:
//! - no stored zero coefficients (enforced on every insertion),
//! - all exponent vectors have length `nvars`,
//! - terms are kept in graded-lexicographic order (total degree first,
//!   then lexicographic with variable 0 most significant), so iteration
//!   order, equality and serialization are deterministic.
//!
//! Division is single-divisor multivariate division in this fixed
//! order; for one divisor, a zero remainder is equivalent to ideal
//! membership, which is what the Laurent layer needs to decide
//! divisibility by the quadratic momentum polynomial.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::Zero;

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

/// Exponent vector ordered by graded lex (degree, then x0 > x1 > ...).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Expo(pub Vec<u32>);

impl Expo {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn divides(&self, other: &Expo) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn sub(&self, other: &Expo) -> Expo {
        Expo(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    fn add(&self, other: &Expo) -> Expo {
        Expo(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Expo {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Expo {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A sparse polynomial over the rationals in `nvars` variables.
///
/// The zero polynomial is the empty term map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Expo, Scalar>,
}

impl MultiPoly {
    // ---- Constructors ----

    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let mut p = Self::zero(nvars);
        p.insert(Expo(vec![0; nvars]), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, scalar::one())
    }

    /// The variable `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.insert(Expo(e), scalar::one());
        p
    }

    /// A single term `c * x^exp`.
    pub fn monomial(nvars: usize, exp: Vec<u32>, c: Scalar) -> Self {
        assert_eq!(exp.len(), nvars);
        let mut p = Self::zero(nvars);
        p.insert(Expo(exp), c);
        p
    }

    pub fn from_terms(nvars: usize, it: impl IntoIterator<Item = (Vec<u32>, Scalar)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in it {
            assert_eq!(e.len(), nvars);
            p.insert(Expo(e), c);
        }
        p
    }

    // ---- Queries ----

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|e| e.degree())
    }

    /// Leading term in graded-lex order.
    pub fn leading_term(&self) -> Option<(&Expo, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn coeff(&self, exp: &[u32]) -> Scalar {
        self.terms
            .get(&Expo(exp.to_vec()))
            .cloned()
            .unwrap_or_else(scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Expo, &Scalar)> {
        self.terms.iter()
    }

    /// True if every term has total degree `d`.
    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.terms.keys().all(|e| e.degree() == d)
    }

    // ---- Arithmetic ----

    fn insert(&mut self, e: Expo, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VariableMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    pub fn add_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.nvars, other.nvars);
        for (e, c) in &other.terms {
            self.insert(e.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Self, s: &Scalar) {
        debug_assert_eq!(self.nvars, other.nvars);
        if s.is_zero() {
            return;
        }
        for (e, c) in &other.terms {
            self.insert(e.clone(), c.clone() * s.clone());
        }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return Self::zero(self.nvars);
        }
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.insert(ea.add(eb), ca.clone() * cb.clone());
            }
        }
        out
    }

    /// Partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> Self {
        assert!(i < self.nvars);
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e.0[i];
            if k == 0 {
                continue;
            }
            let mut e2 = e.0.clone();
            e2[i] -= 1;
            out.insert(Expo(e2), c.clone() * scalar::int(k as i64));
        }
        out
    }

    /// Splits into homogeneous components keyed by total degree.
    pub fn euler_degree_split(&self) -> BTreeMap<u32, MultiPoly> {
        let mut out: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            out.entry(e.degree())
                .or_insert_with(|| MultiPoly::zero(self.nvars))
                .insert(e.clone(), c.clone());
        }
        out
    }

    /// Single-divisor division: returns `(q, r)` with `self = q*g + r`
    /// and no term of `r` divisible by the leading term of `g`.
    pub fn divide_single(&self, g: &Self) -> Result<(Self, Self)> {
        self.check_compatible(g)?;
        let (lt_exp, lt_coeff) = match g.leading_term() {
            Some((e, c)) => (e.clone(), c.clone()),
            None => return Err(Error::DivisionByZero),
        };
        let mut quotient = Self::zero(self.nvars);
        let mut remainder = Self::zero(self.nvars);
        let mut work = self.clone();
        while let Some((e, c)) = work.leading_term().map(|(e, c)| (e.clone(), c.clone())) {
            if lt_exp.divides(&e) {
                let t_exp = e.sub(&lt_exp);
                let t_coeff = c / lt_coeff.clone();
                // work -= t * g
                for (ge, gc) in &g.terms {
                    work.insert(ge.add(&t_exp), -(gc.clone() * t_coeff.clone()));
                }
                quotient.insert(t_exp, t_coeff);
            } else {
                work.terms.remove(&e);
                remainder.insert(e, c);
            }
        }
        Ok((quotient, remainder))
    }

    /// True iff `g` divides `self` exactly (zero remainder).
    pub fn divisible_by(&self, g: &Self) -> Result<bool> {
        Ok(self.divide_single(g)?.1.is_zero())
    }

    // ---- Serialization / display ----

    /// Canonical JSON: sorted term list with stringified coefficients.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(e, c)| {
                serde_json::json!({
                    "exp": e.0,
                    "num": c.numer().to_string(),
                    "den": c.denom().to_string(),
                })
            })
            .collect();
        serde_json::Value::Array(terms)
    }

    /// Renders with the given variable names (one per variable).
    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        // highest term first reads better
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .0
                .iter()
                .enumerate()
                .filter(|(_, k)| **k > 0)
                .map(|(i, k)| {
                    if *k == 1 {
                        names[i].clone()
                    } else {
                        format!("{}^{}", names[i], k)
                    }
                })
                .collect();
            let coeff = scalar::display(c);
            let piece = if mono.is_empty() {
                coeff
            } else if c == &scalar::one() {
                mono.join("*")
            } else if c == &scalar::int(-1) {
                format!("-{}", mono.join("*"))
            } else {
                format!("{}*{}", coeff, mono.join("*"))
            };
            if out.is_empty() {
                out.push_str(&piece);
            } else if let Some(rest) = piece.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&piece);
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{}", i)).collect();
        write!(f, "{}", self.display_with(&names))
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, &scalar::int(-1));
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        MultiPoly::mul(self, rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&scalar::int(-1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn x(i: usize) -> MultiPoly {
        MultiPoly::var(3, i)
    }

    #[test]
    fn monomial_product() {
        let p = &x(0) * &x(1);
        assert_eq!(p.coeff(&[1, 1, 0]), int(1));
        assert_eq!(p.num_terms(), 1);
    }

    #[test]
    fn partial_derivative_of_square() {
        let p = &x(0) * &x(0);
        assert_eq!(p.partial(0), x(0).scale(&int(2)));
        assert!(p.partial(1).is_zero());
    }

    #[test]
    fn euler_split_by_total_degree() {
        let p = &x(0) + &(&x(0) * &x(1));
        let parts = p.euler_degree_split();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[&1], x(0));
        assert_eq!(parts[&2], &x(0) * &x(1));
    }

    #[test]
    fn division_exact() {
        // H^2 / H = (H, 0) with H = x0^2 + x1^2
        let h = &(&x(0) * &x(0)) + &(&x(1) * &x(1));
        let h2 = &h * &h;
        let (q, r) = h2.divide_single(&h).unwrap();
        assert_eq!(q, h);
        assert!(r.is_zero());

        let f = (&h * &x(0)).scale(&int(2));
        let (q, r) = f.divide_single(&h).unwrap();
        assert_eq!(q, x(0).scale(&int(2)));
        assert!(r.is_zero());
    }

    #[test]
    fn division_with_remainder() {
        // x0*x1 divided by x0+x1 leaves remainder -x1^2
        let f = &x(0) * &x(1);
        let g = &x(0) + &x(1);
        let (q, r) = f.divide_single(&g).unwrap();
        assert_eq!(q, x(1));
        assert_eq!(r, (&x(1) * &x(1)).scale(&int(-1)));
        // round trip
        assert_eq!(&(&q * &g) + &r, f);
    }

    #[test]
    fn division_by_zero_rejected() {
        let f = x(0);
        assert!(matches!(
            f.divide_single(&MultiPoly::zero(3)),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn graded_lex_leading_term() {
        // x0^2 beats x0*x1 beats x1^2 beats x0
        let p = MultiPoly::from_terms(
            3,
            vec![
                (vec![1, 0, 0], int(1)),
                (vec![0, 2, 0], int(1)),
                (vec![1, 1, 0], int(1)),
                (vec![2, 0, 0], int(1)),
            ],
        );
        assert_eq!(p.leading_term().unwrap().0, &Expo(vec![2, 0, 0]));
    }

    #[test]
    fn display_readable() {
        let p = &x(0).scale(&ratio(1, 2)) - &MultiPoly::one(3);
        assert_eq!(format!("{}", p), "1/2*x0 - 1");
    }
}
