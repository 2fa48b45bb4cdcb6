//! Truncated formal power series in the deformation parameter.
//!
//! A `NuSeries` holds coefficients `f_0, ..., f_N` meaning
//! `sum_r nu^r f_r`, correct modulo `nu^(N+1)`. The truncation order is
//! fixed per series and all binary operations require matching orders.
//! The parameter is real in the sense that conjugation acts as
//! `nu -> -nu` with identity on the rational coefficients.

use std::fmt;

use crate::error::{Error, Result};
use crate::laurent::{HContext, LaurentH};
use crate::scalar::{self, Scalar};

/// A truncated series with Laurent-in-H coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NuSeries {
    coeffs: Vec<LaurentH>,
}

impl NuSeries {
    // ---- Constructors ----

    pub fn zero(ctx: &HContext, order: usize) -> Self {
        NuSeries {
            coeffs: vec![LaurentH::zero(ctx); order + 1],
        }
    }

    pub fn one(ctx: &HContext, order: usize) -> Self {
        Self::from_constant(LaurentH::one(ctx), order)
    }

    /// Embeds a parameter-free function at order zero.
    pub fn from_constant(f: LaurentH, order: usize) -> Self {
        let mut coeffs = vec![LaurentH::zero(f.ctx()); order + 1];
        coeffs[0] = f;
        NuSeries { coeffs }
    }

    pub fn from_coeffs(coeffs: Vec<LaurentH>) -> Self {
        assert!(!coeffs.is_empty());
        NuSeries { coeffs }
    }

    // ---- Queries ----

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn ctx(&self) -> &HContext {
        self.coeffs[0].ctx()
    }

    pub fn coeff(&self, r: usize) -> &LaurentH {
        &self.coeffs[r]
    }

    pub fn coeffs(&self) -> &[LaurentH] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// True if only the order-zero coefficient is nonzero.
    pub fn is_classical(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// Requires a parameter-free series and returns its value.
    pub fn classical(&self) -> Result<&LaurentH> {
        for (r, c) in self.coeffs.iter().enumerate().skip(1) {
            if !c.is_zero() {
                return Err(Error::NotClassical(r));
            }
        }
        Ok(&self.coeffs[0])
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::TruncationMismatch(self.order(), other.order()));
        }
        Ok(())
    }

    // ---- Arithmetic ----

    pub fn add(&self, other: &Self) -> Self {
        self.check(other).expect("truncation mismatch");
        NuSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other).expect("truncation mismatch");
        NuSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&scalar::int(-1))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        NuSeries {
            coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect(),
        }
    }

    /// Pointwise (commutative) product, truncated.
    pub fn mul_pointwise(&self, other: &Self) -> Self {
        self.check(other).expect("truncation mismatch");
        let n = self.order();
        let mut coeffs = vec![LaurentH::zero(self.ctx()); n + 1];
        for s in 0..=n {
            if self.coeffs[s].is_zero() {
                continue;
            }
            for t in 0..=(n - s) {
                if other.coeffs[t].is_zero() {
                    continue;
                }
                let prod = self.coeffs[s].mul(&other.coeffs[t]);
                coeffs[s + t] = coeffs[s + t].add(&prod);
            }
        }
        NuSeries { coeffs }
    }

    /// Multiplies by a parameter-free function.
    pub fn mul_laurent(&self, f: &LaurentH) -> Self {
        NuSeries {
            coeffs: self.coeffs.iter().map(|c| c.mul(f)).collect(),
        }
    }

    /// Multiplies by `nu^j`, dropping coefficients past the truncation.
    pub fn shift_nu(&self, j: usize) -> Self {
        let n = self.order();
        let mut coeffs = vec![LaurentH::zero(self.ctx()); n + 1];
        for r in 0..=n {
            if r + j <= n {
                coeffs[r + j] = self.coeffs[r].clone();
            }
        }
        NuSeries { coeffs }
    }

    /// Divides by `nu^j`; requires the low-order coefficients to vanish.
    pub fn div_nu(&self, j: usize) -> Result<Self> {
        for r in 0..j.min(self.order() + 1) {
            if !self.coeffs[r].is_zero() {
                return Err(Error::Config(format!(
                    "cannot divide by nu^{}: nonzero coefficient at order {}",
                    j, r
                )));
            }
        }
        let n = self.order();
        let mut coeffs = vec![LaurentH::zero(self.ctx()); n + 1];
        for r in j..=n {
            coeffs[r - j] = self.coeffs[r].clone();
        }
        Ok(NuSeries { coeffs })
    }

    /// Conjugation `nu -> -nu` (coefficients are real).
    pub fn conj_nu(&self) -> Self {
        NuSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(r, c)| if r % 2 == 1 { c.neg() } else { c.clone() })
                .collect(),
        }
    }

    /// Applies `nu * d/dnu`.
    pub fn nu_times_dnu(&self) -> Self {
        NuSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(r, c)| c.scale(&scalar::int(r as i64)))
                .collect(),
        }
    }

    /// Applies a map to every coefficient.
    pub fn map<F: FnMut(&LaurentH) -> LaurentH>(&self, mut f: F) -> Self {
        NuSeries {
            coeffs: self.coeffs.iter().map(|c| f(c)).collect(),
        }
    }

    /// Applies a fallible map to every coefficient.
    pub fn try_map<F: FnMut(&LaurentH) -> Result<LaurentH>>(&self, mut f: F) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            coeffs.push(f(c)?);
        }
        Ok(NuSeries { coeffs })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let list: Vec<serde_json::Value> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(r, c)| serde_json::json!({ "nu": r, "value": c.to_json() }))
            .collect();
        serde_json::Value::Array(list)
    }
}

impl fmt::Display for NuSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (r, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if r == 0 {
                write!(f, "{}", c)?;
            } else {
                write!(f, "nu^{}*({})", r, c)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MultiPoly;

    fn ctx() -> HContext {
        let n = 2;
        let mut h = MultiPoly::zero(n);
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 2;
            h.add_assign(&MultiPoly::monomial(n, e, crate::scalar::ratio(1, 2)));
        }
        HContext::new(h, vec!["x0".into(), "x1".into()])
    }

    #[test]
    fn truncated_product() {
        let c = ctx();
        // (1 + nu*x0)^2 = 1 + 2 nu x0 + nu^2 x0^2, truncate at order 1
        let x0 = LaurentH::from_poly(&c, MultiPoly::var(2, 0));
        let mut f = NuSeries::one(&c, 1);
        f = f.add(&NuSeries::from_constant(x0.clone(), 1).shift_nu(1));
        let sq = f.mul_pointwise(&f);
        assert_eq!(sq.coeff(0), &LaurentH::one(&c));
        assert_eq!(sq.coeff(1), &x0.scale(&crate::scalar::int(2)));
    }

    #[test]
    fn classical_detection() {
        let c = ctx();
        let f = NuSeries::one(&c, 2);
        assert!(f.classical().is_ok());
        let g = f.shift_nu(1);
        assert!(matches!(g.classical(), Err(Error::NotClassical(1))));
    }

    #[test]
    fn nu_shift_and_division() {
        let c = ctx();
        let f = NuSeries::one(&c, 3).shift_nu(2);
        let g = f.div_nu(2).unwrap();
        assert_eq!(g.coeff(0), &LaurentH::one(&c));
        assert!(f.div_nu(3).is_err());
    }
}
