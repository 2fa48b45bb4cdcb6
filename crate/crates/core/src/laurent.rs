//! The Laurent-in-H function algebra.
//!
//! Functions on the cone are stored as finite sums `sum_k p_k * H^-k`
//! with polynomial numerators, where `H` is the quadratic momentum
//! polynomial supplied by a shared [`HContext`]. This class is closed
//! under all operators of the reduction (products, derivatives, the
//! Koszul homotopy, the second-order operator), so no other function
//! representation is ever needed.
//!
//! Canonical form: the `k = 0` slot absorbs all polynomial parts, and
//! for `k >= 1` the numerator `p_k` is fully reduced modulo the leading
//! term of `H` (in particular `H` does not divide `p_k`). Reduction is
//! performed slot-by-slot from the highest power down, so equal
//! functions have identical representations and equality is plain
//! structural comparison. The reduced form is unique: a difference of
//! two reduced representations, cleared of denominators, would exhibit
//! a reduced numerator divisible by `H`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::scalar::{self, Scalar};

/// Shared cone data: variable count, the momentum polynomial `H`, its
/// partials, and display names for the coordinates.
#[derive(Debug)]
pub struct HData {
    nvars: usize,
    h: MultiPoly,
    h_partials: Vec<MultiPoly>,
    names: Vec<String>,
}

/// Cheaply clonable handle to the cone data. Two contexts are
/// compatible when they agree structurally on `H`.
#[derive(Clone, Debug)]
pub struct HContext(Arc<HData>);

impl HContext {
    pub fn new(h: MultiPoly, names: Vec<String>) -> Self {
        let nvars = h.nvars();
        assert_eq!(names.len(), nvars);
        let h_partials = (0..nvars).map(|i| h.partial(i)).collect();
        HContext(Arc::new(HData {
            nvars,
            h,
            h_partials,
            names,
        }))
    }

    pub fn nvars(&self) -> usize {
        self.0.nvars
    }

    pub fn h_poly(&self) -> &MultiPoly {
        &self.0.h
    }

    pub fn h_partial(&self, i: usize) -> &MultiPoly {
        &self.0.h_partials[i]
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn compatible(&self, other: &HContext) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.h == other.0.h
    }
}

/// A function `sum_k p_k * H^-k` in canonical form.
#[derive(Clone, Debug)]
pub struct LaurentH {
    ctx: HContext,
    parts: BTreeMap<u32, MultiPoly>,
}

impl LaurentH {
    // ---- Constructors ----

    pub fn zero(ctx: &HContext) -> Self {
        LaurentH {
            ctx: ctx.clone(),
            parts: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &HContext) -> Self {
        Self::from_poly(ctx, MultiPoly::one(ctx.nvars()))
    }

    pub fn constant(ctx: &HContext, c: Scalar) -> Self {
        Self::from_poly(ctx, MultiPoly::constant(ctx.nvars(), c))
    }

    /// A plain polynomial (sits in the `k = 0` slot).
    pub fn from_poly(ctx: &HContext, p: MultiPoly) -> Self {
        Self::from_parts(ctx, [(0, p)])
    }

    /// `p * H^-k`, normalized.
    pub fn from_part(ctx: &HContext, k: u32, p: MultiPoly) -> Self {
        Self::from_parts(ctx, [(k, p)])
    }

    /// Builds from arbitrary `(k, numerator)` pairs and normalizes.
    pub fn from_parts(ctx: &HContext, it: impl IntoIterator<Item = (u32, MultiPoly)>) -> Self {
        let mut parts: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (k, p) in it {
            assert_eq!(p.nvars(), ctx.nvars());
            if p.is_zero() {
                continue;
            }
            match parts.get_mut(&k) {
                Some(q) => q.add_assign(&p),
                None => {
                    parts.insert(k, p);
                }
            }
        }
        let mut out = LaurentH {
            ctx: ctx.clone(),
            parts,
        };
        out.normalize();
        out
    }

    /// The momentum function `H` itself.
    pub fn h(ctx: &HContext) -> Self {
        Self::from_poly(ctx, ctx.h_poly().clone())
    }

    /// `H^-k`.
    pub fn h_inv_pow(ctx: &HContext, k: u32) -> Self {
        Self::from_part(ctx, k, MultiPoly::one(ctx.nvars()))
    }

    // ---- Canonical form ----

    /// Restores the canonical form: every `k >= 1` numerator reduced
    /// modulo `H`, quotients pushed down towards the polynomial slot,
    /// zero numerators dropped.
    fn normalize(&mut self) {
        let h = self.ctx.h_poly().clone();
        let mut k = match self.parts.keys().next_back() {
            Some(k) => *k,
            None => return,
        };
        while k >= 1 {
            if let Some(p) = self.parts.remove(&k) {
                let (q, r) = p.divide_single(&h).expect("H is nonzero");
                if !r.is_zero() {
                    self.parts.insert(k, r);
                }
                if !q.is_zero() {
                    match self.parts.get_mut(&(k - 1)) {
                        Some(t) => t.add_assign(&q),
                        None => {
                            self.parts.insert(k - 1, q);
                        }
                    }
                }
            }
            k -= 1;
        }
        if let Some(p) = self.parts.get(&0) {
            if p.is_zero() {
                self.parts.remove(&0);
            }
        }
    }

    // ---- Queries ----

    pub fn ctx(&self) -> &HContext {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// Highest `H^-k` power present.
    pub fn max_hpow(&self) -> u32 {
        self.parts.keys().next_back().copied().unwrap_or(0)
    }

    /// Iterates over `(k, numerator)` slots in ascending `k`.
    pub fn parts(&self) -> impl Iterator<Item = (u32, &MultiPoly)> {
        self.parts.iter().map(|(k, p)| (*k, p))
    }

    pub fn part(&self, k: u32) -> Option<&MultiPoly> {
        self.parts.get(&k)
    }

    /// If the value is a constant, returns it.
    pub fn as_constant(&self) -> Option<Scalar> {
        if self.parts.is_empty() {
            return Some(scalar::zero());
        }
        if self.parts.len() == 1 {
            if let Some(p) = self.parts.get(&0) {
                if p.degree() == Some(0) {
                    return Some(p.coeff(&vec![0; self.ctx.nvars()]));
                }
            }
        }
        None
    }

    fn check(&self, other: &Self) -> Result<()> {
        if !self.ctx.compatible(&other.ctx) {
            return Err(Error::ModelMismatch);
        }
        Ok(())
    }

    // ---- Arithmetic ----

    pub fn add(&self, other: &Self) -> Self {
        self.check(other).expect("incompatible cone models");
        let mut parts = self.parts.clone();
        for (k, p) in &other.parts {
            match parts.get_mut(k) {
                Some(q) => q.add_assign(p),
                None => {
                    parts.insert(*k, p.clone());
                }
            }
        }
        let mut out = LaurentH {
            ctx: self.ctx.clone(),
            parts,
        };
        out.normalize();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&scalar::int(-1))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        use num::Zero;
        if s.is_zero() {
            return Self::zero(&self.ctx);
        }
        LaurentH {
            ctx: self.ctx.clone(),
            parts: self
                .parts
                .iter()
                .map(|(k, p)| (*k, p.scale(s)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other).expect("incompatible cone models");
        let mut acc: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (ka, pa) in &self.parts {
            for (kb, pb) in &other.parts {
                let prod = pa * pb;
                match acc.get_mut(&(ka + kb)) {
                    Some(q) => q.add_assign(&prod),
                    None => {
                        acc.insert(ka + kb, prod);
                    }
                }
            }
        }
        let mut out = LaurentH {
            ctx: self.ctx.clone(),
            parts: acc,
        };
        out.normalize();
        out
    }

    pub fn mul_poly(&self, p: &MultiPoly) -> Self {
        let mut out = LaurentH {
            ctx: self.ctx.clone(),
            parts: self.parts.iter().map(|(k, q)| (*k, q.mul(p))).collect(),
        };
        out.normalize();
        out
    }

    /// Multiplies by `H^j` (j may be negative).
    pub fn shift_hpow(&self, j: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        if j >= 0 {
            let mut out = self.clone();
            for _ in 0..j {
                out = out.mul(&Self::h(&self.ctx));
            }
            out
        } else {
            let parts: Vec<(u32, MultiPoly)> = self
                .parts
                .iter()
                .map(|(k, p)| (*k + (-j) as u32, p.clone()))
                .collect();
            Self::from_parts(&self.ctx, parts)
        }
    }

    /// Partial derivative; uses `d(H^-k) = -k H^-(k+1) dH`.
    pub fn partial(&self, i: usize) -> Self {
        let dh = self.ctx.h_partial(i);
        let mut acc: Vec<(u32, MultiPoly)> = Vec::new();
        for (k, p) in &self.parts {
            let dp = p.partial(i);
            if !dp.is_zero() {
                acc.push((*k, dp));
            }
            if *k > 0 {
                let corr = p.mul(dh).scale(&scalar::int(-(*k as i64)));
                if !corr.is_zero() {
                    acc.push((*k + 1, corr));
                }
            }
        }
        Self::from_parts(&self.ctx, acc)
    }

    // ---- Structure ----

    /// Clears denominators: returns `(P, K)` with `self = P * H^-K`.
    pub fn clear_denominators(&self) -> (MultiPoly, u32) {
        let kmax = self.max_hpow();
        let mut out = MultiPoly::zero(self.ctx.nvars());
        for (k, p) in &self.parts {
            let mut t = p.clone();
            for _ in 0..(kmax - k) {
                t = t.mul(self.ctx.h_poly());
            }
            out.add_assign(&t);
        }
        (out, kmax)
    }

    /// Equality decided by clearing denominators; used as an
    /// independent oracle for the canonical form.
    pub fn eq_cleared(&self, other: &Self) -> bool {
        if !self.ctx.compatible(&other.ctx) {
            return false;
        }
        let k = self.max_hpow().max(other.max_hpow());
        let (pa, ka) = self.clear_denominators();
        let (pb, kb) = other.clear_denominators();
        let mut pa2 = pa;
        for _ in 0..(k - ka) {
            pa2 = pa2.mul(self.ctx.h_poly());
        }
        let mut pb2 = pb;
        for _ in 0..(k - kb) {
            pb2 = pb2.mul(self.ctx.h_poly());
        }
        pa2 == pb2
    }

    /// Decomposes into pieces `p * H^-k` with `p` homogeneous of degree
    /// `d`; the Euler eigenvalue of such a piece is `d/2 - k`.
    pub fn homogeneous_pieces(&self) -> Vec<(u32, u32, MultiPoly)> {
        let mut out = Vec::new();
        for (k, p) in &self.parts {
            for (d, q) in p.euler_degree_split() {
                out.push((*k, d, q));
            }
        }
        out
    }

    /// True if every piece has Euler degree zero (numerator degree `2k`).
    pub fn is_degree_zero(&self) -> bool {
        self.homogeneous_pieces()
            .iter()
            .all(|(k, d, _)| *d == 2 * *k)
    }

    // ---- Serialization / display ----

    pub fn to_json(&self) -> serde_json::Value {
        let list: Vec<serde_json::Value> = self
            .parts
            .iter()
            .map(|(k, p)| serde_json::json!({ "hpow": k, "poly": p.to_json() }))
            .collect();
        serde_json::Value::Array(list)
    }
}

/// Accumulates raw `(hpow, numerator)` contributions and normalizes
/// once at the end; the workhorse for large contractions.
pub struct LaurentAcc {
    ctx: HContext,
    parts: BTreeMap<u32, MultiPoly>,
}

impl LaurentAcc {
    pub fn new(ctx: &HContext) -> Self {
        LaurentAcc {
            ctx: ctx.clone(),
            parts: BTreeMap::new(),
        }
    }

    fn slot(&mut self, k: u32) -> &mut MultiPoly {
        let nvars = self.ctx.nvars();
        self.parts.entry(k).or_insert_with(|| MultiPoly::zero(nvars))
    }

    pub fn add_scaled(&mut self, a: &LaurentH, s: &Scalar) {
        use num::Zero;
        if s.is_zero() {
            return;
        }
        for (k, p) in a.parts() {
            self.slot(k).add_scaled(p, s);
        }
    }

    /// Adds `s * a * b` without intermediate normalization.
    pub fn add_product_scaled(&mut self, a: &LaurentH, b: &LaurentH, s: &Scalar) {
        use num::Zero;
        if s.is_zero() {
            return;
        }
        for (ka, pa) in a.parts() {
            for (kb, pb) in b.parts() {
                let prod = pa.mul(pb).scale(s);
                self.slot(ka + kb).add_assign(&prod);
            }
        }
    }

    pub fn finish(self) -> LaurentH {
        LaurentH::from_parts(&self.ctx, self.parts)
    }
}

impl PartialEq for LaurentH {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.compatible(&other.ctx) && self.parts == other.parts
    }
}

impl Eq for LaurentH {}

impl fmt::Display for LaurentH {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = self.ctx.names();
        let mut first = true;
        for (k, p) in &self.parts {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let body = p.display_with(names);
            if *k == 0 {
                write!(f, "{}", body)?;
            } else if p.num_terms() == 1 {
                write!(f, "{}*H^-{}", body, k)?;
            } else {
                write!(f, "({})*H^-{}", body, k)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn ctx() -> HContext {
        // H = 1/2 (x0^2 + x1^2 + x2^2 + x3^2)
        let n = 4;
        let mut h = MultiPoly::zero(n);
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 2;
            h.add_assign(&MultiPoly::monomial(n, e, crate::scalar::ratio(1, 2)));
        }
        HContext::new(h, (0..n).map(|i| format!("x{}", i)).collect())
    }

    #[test]
    fn h_times_p_drops_a_power() {
        let c = ctx();
        let p = MultiPoly::var(4, 0);
        let hp = c.h_poly().mul(&p);
        let f = LaurentH::from_part(&c, 2, hp);
        assert_eq!(f, LaurentH::from_part(&c, 1, p));
    }

    #[test]
    fn h_over_h_is_one() {
        let c = ctx();
        let f = LaurentH::from_part(&c, 1, c.h_poly().clone());
        assert_eq!(f, LaurentH::one(&c));
        let g = LaurentH::h_inv_pow(&c, 1).mul(&LaurentH::h(&c));
        assert_eq!(g, LaurentH::one(&c));
    }

    #[test]
    fn zero_numerator_is_zero() {
        let c = ctx();
        let f = LaurentH::from_part(&c, 0, MultiPoly::zero(4));
        assert!(f.is_zero());
    }

    #[test]
    fn partial_of_h_inverse() {
        let c = ctx();
        let f = LaurentH::h_inv_pow(&c, 1);
        let df = f.partial(0);
        // -H^-2 * dH/dx0 = -x0 * H^-2
        let expect = LaurentH::from_part(&c, 2, MultiPoly::var(4, 0).scale(&int(-1)));
        assert_eq!(df, expect);
    }

    #[test]
    fn same_denominator_addition() {
        let c = ctx();
        let p = LaurentH::from_part(&c, 1, MultiPoly::var(4, 0));
        let q = LaurentH::from_part(&c, 1, MultiPoly::var(4, 1));
        let sum = p.add(&q);
        let expect = LaurentH::from_part(&c, 1, &MultiPoly::var(4, 0) + &MultiPoly::var(4, 1));
        assert_eq!(sum, expect);
    }

    #[test]
    fn cleared_equality_oracle_agrees() {
        let c = ctx();
        // (H + x0) * H^-1 should normalize to 1 + x0*H^-1
        let raw = LaurentH::from_part(&c, 1, &c.h_poly().clone() + &MultiPoly::var(4, 0));
        let canon = LaurentH::one(&c).add(&LaurentH::from_part(&c, 1, MultiPoly::var(4, 0)));
        assert_eq!(raw, canon);
        assert!(raw.eq_cleared(&canon));
    }

    #[test]
    fn degree_zero_detection() {
        let c = ctx();
        let quad = &MultiPoly::var(4, 0) * &MultiPoly::var(4, 1);
        assert!(LaurentH::from_part(&c, 1, quad).is_degree_zero());
        assert!(!LaurentH::from_part(&c, 1, MultiPoly::var(4, 0)).is_degree_zero());
    }
}
