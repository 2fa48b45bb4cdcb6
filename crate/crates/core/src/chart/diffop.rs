//! Polynomial-coefficient differential operators on a chart.
//!
//! A `PolyDiffOp` is a finite sum `sum_alpha a_alpha(x, lambda) d^alpha`
//! where the multi-index runs over the chart coordinates and the
//! coefficients are polynomials in the coordinates and the adjoined
//! central parameter `lambda` (representing `i hbar`, with conjugation
//! `lambda -> -lambda`). Composition is by the Leibniz rule; the formal
//! transpose integrates by parts against the constant Liouville volume.

use std::collections::BTreeMap;

use crate::poly::MultiPoly;
use crate::scalar::{self, Scalar};

/// Binomial coefficient as a scalar.
fn binom(n: u32, k: u32) -> Scalar {
    let mut acc = scalar::one();
    for i in 0..k {
        acc = acc * scalar::ratio((n - i) as i64, (i + 1) as i64);
    }
    acc
}

/// A differential operator in `m` chart variables; coefficients live in
/// the shared polynomial space of the owning chart (chart variables,
/// momentum variables, parameter), but must not involve the momenta.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyDiffOp {
    m: usize,
    nvars: usize,
    terms: BTreeMap<Vec<u32>, MultiPoly>,
}

impl PolyDiffOp {
    pub fn zero(m: usize, nvars: usize) -> Self {
        PolyDiffOp {
            m,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(m: usize, nvars: usize) -> Self {
        Self::mult(m, MultiPoly::one(nvars))
    }

    /// Multiplication operator by a polynomial.
    pub fn mult(m: usize, f: MultiPoly) -> Self {
        let nvars = f.nvars();
        let mut op = Self::zero(m, nvars);
        op.add_term(vec![0; m], f);
        op
    }

    /// The partial derivative `d_i`.
    pub fn derivative(m: usize, nvars: usize, i: usize) -> Self {
        assert!(i < m);
        let mut alpha = vec![0; m];
        alpha[i] = 1;
        let mut op = Self::zero(m, nvars);
        op.add_term(alpha, MultiPoly::one(nvars));
        op
    }

    pub fn add_term(&mut self, alpha: Vec<u32>, coeff: MultiPoly) {
        assert_eq!(alpha.len(), self.m);
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&alpha) {
            Some(c) => {
                c.add_assign(&coeff);
                if c.is_zero() {
                    self.terms.remove(&alpha);
                }
            }
            None => {
                self.terms.insert(alpha, coeff);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest total derivative order.
    pub fn order(&self) -> u32 {
        self.terms
            .keys()
            .map(|a| a.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &MultiPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &[u32]) -> Option<&MultiPoly> {
        self.terms.get(alpha)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&scalar::int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        use num::Zero;
        if s.is_zero() {
            return Self::zero(self.m, self.nvars);
        }
        PolyDiffOp {
            m: self.m,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (a.clone(), c.scale(s)))
                .collect(),
        }
    }

    pub fn scale_poly(&self, f: &MultiPoly) -> Self {
        let mut out = Self::zero(self.m, self.nvars);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), c.mul(f));
        }
        out
    }

    /// Applies the operator to a function.
    pub fn apply(&self, u: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (alpha, c) in &self.terms {
            let mut v = u.clone();
            for (i, &k) in alpha.iter().enumerate() {
                for _ in 0..k {
                    v = v.partial(i);
                }
                if v.is_zero() {
                    break;
                }
            }
            if !v.is_zero() {
                out.add_assign(&c.mul(&v));
            }
        }
        out
    }

    /// Operator composition `self . other` by the Leibniz rule.
    pub fn compose(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.m, self.nvars);
        for (alpha, a) in &self.terms {
            for (beta, b) in &other.terms {
                // d^alpha (b v) = sum_{gamma <= alpha} binom(alpha, gamma)
                //                  d^(alpha-gamma) b . d^gamma v
                let mut stack = vec![(Vec::<u32>::new(), b.clone(), scalar::one())];
                for (i, &ai) in alpha.iter().enumerate() {
                    let mut next = Vec::new();
                    for (gamma, db, w) in &stack {
                        for gi in 0..=ai {
                            let mut g2 = gamma.clone();
                            g2.push(gi);
                            let mut d2 = db.clone();
                            for _ in 0..(ai - gi) {
                                d2 = d2.partial(i);
                            }
                            if d2.is_zero() {
                                continue;
                            }
                            next.push((g2, d2, w.clone() * binom(ai, gi)));
                        }
                    }
                    stack = next;
                }
                for (gamma, db, w) in stack {
                    let total: Vec<u32> = gamma.iter().zip(beta).map(|(g, bb)| g + bb).collect();
                    out.add_term(total, a.mul(&db).scale(&w));
                }
            }
        }
        out
    }

    /// Formal transpose against the constant volume:
    /// `(a d^alpha)^T = (-1)^|alpha| d^alpha . a`, expanded to normal
    /// form.
    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.m, self.nvars);
        for (alpha, a) in &self.terms {
            let total: u32 = alpha.iter().sum();
            let sign = if total % 2 == 0 {
                scalar::one()
            } else {
                scalar::int(-1)
            };
            // expand d^alpha . M_a
            let mut stack = vec![(Vec::<u32>::new(), a.clone(), sign)];
            for (i, &ai) in alpha.iter().enumerate() {
                let mut next = Vec::new();
                for (gamma, da, w) in &stack {
                    for gi in 0..=ai {
                        let mut g2 = gamma.clone();
                        g2.push(gi);
                        let mut d2 = da.clone();
                        for _ in 0..(ai - gi) {
                            d2 = d2.partial(i);
                        }
                        if d2.is_zero() {
                            continue;
                        }
                        next.push((g2, d2, w.clone() * binom(ai, gi)));
                    }
                }
                stack = next;
            }
            for (gamma, da, w) in stack {
                out.add_term(gamma, da.scale(&w));
            }
        }
        out
    }

    /// Conjugation `lambda -> -lambda` on the coefficients.
    pub fn conj(&self, lambda_var: usize) -> Self {
        PolyDiffOp {
            m: self.m,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (a.clone(), conj_lambda(c, lambda_var)))
                .collect(),
        }
    }

    /// Formal adjoint: transpose followed by conjugation.
    pub fn adjoint(&self, lambda_var: usize) -> Self {
        self.transpose().conj(lambda_var)
    }
}

/// Negates all terms of odd degree in the parameter variable.
pub fn conj_lambda(f: &MultiPoly, lambda_var: usize) -> MultiPoly {
    let terms: Vec<(Vec<u32>, Scalar)> = f
        .terms()
        .map(|(e, c)| {
            let sign = if e.0[lambda_var] % 2 == 1 {
                -c.clone()
            } else {
                c.clone()
            };
            (e.0.clone(), sign)
        })
        .collect();
    MultiPoly::from_terms(f.nvars(), terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    // two chart variables, one momentum pair slot unused, lambda last
    const M: usize = 2;
    const NV: usize = 5;
    const LAM: usize = 4;

    fn x(i: usize) -> MultiPoly {
        MultiPoly::var(NV, i)
    }

    #[test]
    fn compose_leibniz() {
        // d_0 . x_0 = 1 + x_0 d_0
        let d0 = PolyDiffOp::derivative(M, NV, 0);
        let mx = PolyDiffOp::mult(M, x(0));
        let c = d0.compose(&mx);
        assert_eq!(c.coeff(&[0, 0]), Some(&MultiPoly::one(NV)));
        assert_eq!(c.coeff(&[1, 0]), Some(&x(0)));
        // applying to x_0^2: d_0(x_0 * x_0^2) = 3 x_0^2
        let u = &x(0) * &x(0);
        assert_eq!(c.apply(&u), (&x(0) * &x(0)).scale(&scalar::int(3)));
    }

    #[test]
    fn composition_is_associative() {
        let a = PolyDiffOp::derivative(M, NV, 0).compose(&PolyDiffOp::mult(M, x(1)));
        let b = PolyDiffOp::mult(M, &x(0) + &x(1)).compose(&PolyDiffOp::derivative(M, NV, 1));
        let c = PolyDiffOp::derivative(M, NV, 1);
        assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
    }

    #[test]
    fn transpose_involution_and_signs() {
        let d0 = PolyDiffOp::derivative(M, NV, 0);
        assert_eq!(d0.transpose(), d0.scale(&scalar::int(-1)));
        let op = d0
            .compose(&PolyDiffOp::mult(M, &x(0) * &x(1)))
            .compose(&PolyDiffOp::derivative(M, NV, 1));
        assert_eq!(op.transpose().transpose(), op);
        // (DE)^T = E^T D^T
        let e = PolyDiffOp::mult(M, x(1)).compose(&PolyDiffOp::derivative(M, NV, 1));
        assert_eq!(
            op.compose(&e).transpose(),
            e.transpose().compose(&op.transpose())
        );
    }

    #[test]
    fn adjoint_conjugates_parameter() {
        let lam = MultiPoly::var(NV, LAM);
        let op = PolyDiffOp::derivative(M, NV, 0).scale_poly(&lam);
        // (lambda d_0)^dagger = (-d_0) . (-lambda) = lambda d_0
        assert_eq!(op.adjoint(LAM), op);
    }
}
