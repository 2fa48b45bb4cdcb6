//! The flat cone model.
//!
//! For `n >= 1` the model lives on `N = 2n+2` coordinates, ordered as
//! `(p_0, ..., p_n, q_0, ..., q_n)`. The structure consists of
//! - the constant symplectic matrix `mu` in standard block form
//!   `[[0, I], [-I, 0]]`,
//! - its inverse Poisson matrix `Lambda` (normalized `Lambda mu = I`,
//!   so `{q_i, p_j} = delta_ij` and the momentum field satisfies
//!   `i_{X_H} mu = dH`),
//! - the quadratic momentum `H = 1/2 x^T G x` with `G = diag(signature)`,
//! - the halved Euler field `S = 1/2 x^a d_a` (so `L_S H = H` and
//!   `L_S mu = mu`),
//! - the linear Hamiltonian field `X_H = {H, .}`.
//!
//! The covectors `ds = dH/H` and `alpha = (i_S mu)/H` split the tangent
//! space; the horizontal projector is `Pi v = v - ds(v) S + alpha(v) X_H`.
//! The flat connection is the coordinate derivative; all the structure
//! equations it must satisfy are verified in `frame`.

use crate::error::{Error, Result};
use crate::laurent::{HContext, LaurentH};
use crate::poly::MultiPoly;
use crate::scalar::{self, Scalar};

use num::Zero;

/// The cone model; immutable after construction.
#[derive(Debug)]
pub struct FlatModel {
    n: usize,
    nvars: usize,
    signature: Vec<i64>,
    mu: Vec<Vec<Scalar>>,
    lambda: Vec<Vec<Scalar>>,
    /// Per-row nonzero entries of `lambda` (column, value).
    lambda_sparse: Vec<Vec<(usize, Scalar)>>,
    g_diag: Vec<Scalar>,
    ctx: HContext,
    /// `X_H = A x` with `A = -Lambda G`.
    xh_matrix: Vec<Vec<Scalar>>,
}

impl FlatModel {
    /// Builds the cone model with `N = 2n+2` coordinates and
    /// `G = diag(signature)`. The paper-faithful geometry wants
    /// `n >= 2`; `n = 1` is accepted for algebraic smoke tests.
    pub fn build(n: usize, signature: &[i64]) -> Result<FlatModel> {
        if n < 1 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        let nvars = 2 * n + 2;
        if signature.len() != nvars {
            return Err(Error::Config(format!(
                "signature must have length {} (got {})",
                nvars,
                signature.len()
            )));
        }
        if signature.iter().any(|s| *s == 0) {
            return Err(Error::Config("signature entries must be nonzero".into()));
        }
        let half = n + 1;
        let mut mu = vec![vec![scalar::zero(); nvars]; nvars];
        let mut lambda = vec![vec![scalar::zero(); nvars]; nvars];
        for i in 0..half {
            // mu = [[0, I], [-I, 0]] in (p, q) block order
            mu[i][half + i] = scalar::one();
            mu[half + i][i] = scalar::int(-1);
            // Lambda = mu^{-1} = [[0, -I], [I, 0]]
            lambda[i][half + i] = scalar::int(-1);
            lambda[half + i][i] = scalar::one();
        }
        let lambda_sparse: Vec<Vec<(usize, Scalar)>> = lambda
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| (j, v.clone()))
                    .collect()
            })
            .collect();
        let g_diag: Vec<Scalar> = signature.iter().map(|s| scalar::int(*s)).collect();

        // H = 1/2 x^T G x
        let mut h = MultiPoly::zero(nvars);
        for a in 0..nvars {
            let mut e = vec![0; nvars];
            e[a] = 2;
            h.add_assign(&MultiPoly::monomial(
                nvars,
                e,
                g_diag[a].clone() * scalar::ratio(1, 2),
            ));
        }
        let names: Vec<String> = (0..nvars)
            .map(|a| {
                if a < half {
                    format!("p{}", a)
                } else {
                    format!("q{}", a - half)
                }
            })
            .collect();
        let ctx = HContext::new(h, names);

        // X_H^b = Lambda^{ab} (Gx)_a = sum_a Lambda^{ab} g_a x^a.
        let mut xh_matrix = vec![vec![scalar::zero(); nvars]; nvars];
        for b in 0..nvars {
            for a in 0..nvars {
                xh_matrix[b][a] = lambda[a][b].clone() * g_diag[a].clone();
            }
        }

        Ok(FlatModel {
            n,
            nvars,
            signature: signature.to_vec(),
            mu,
            lambda,
            lambda_sparse,
            g_diag,
            ctx,
            xh_matrix,
        })
    }

    // ---- Accessors ----

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn signature(&self) -> &[i64] {
        &self.signature
    }

    pub fn ctx(&self) -> &HContext {
        &self.ctx
    }

    pub fn mu(&self) -> &[Vec<Scalar>] {
        &self.mu
    }

    pub fn lambda(&self) -> &[Vec<Scalar>] {
        &self.lambda
    }

    pub fn lambda_sparse(&self) -> &[Vec<(usize, Scalar)>] {
        &self.lambda_sparse
    }

    pub fn g_diag(&self) -> &[Scalar] {
        &self.g_diag
    }

    /// Coefficient matrix of the linear field `X_H` (`X_H^b = A[b][a] x^a`).
    pub fn xh_matrix(&self) -> &[Vec<Scalar>] {
        &self.xh_matrix
    }

    /// Index of the coordinate `p_i`.
    pub fn p_index(&self, i: usize) -> usize {
        i
    }

    /// Index of the coordinate `q_i`.
    pub fn q_index(&self, i: usize) -> usize {
        self.n + 1 + i
    }

    // ---- Basic fields and forms ----

    pub fn h(&self) -> LaurentH {
        LaurentH::h(&self.ctx)
    }

    /// Components of `S` as polynomials (`S^a = x^a / 2`).
    pub fn s_components(&self) -> Vec<MultiPoly> {
        (0..self.nvars)
            .map(|a| MultiPoly::var(self.nvars, a).scale(&scalar::ratio(1, 2)))
            .collect()
    }

    /// Components of `X_H` as polynomials.
    pub fn xh_components(&self) -> Vec<MultiPoly> {
        (0..self.nvars)
            .map(|b| {
                let mut p = MultiPoly::zero(self.nvars);
                for a in 0..self.nvars {
                    if !self.xh_matrix[b][a].is_zero() {
                        p.add_assign(
                            &MultiPoly::var(self.nvars, a).scale(&self.xh_matrix[b][a]),
                        );
                    }
                }
                p
            })
            .collect()
    }

    pub fn s_vector(&self) -> Vec<LaurentH> {
        self.s_components()
            .into_iter()
            .map(|p| LaurentH::from_poly(&self.ctx, p))
            .collect()
    }

    pub fn xh_vector(&self) -> Vec<LaurentH> {
        self.xh_components()
            .into_iter()
            .map(|p| LaurentH::from_poly(&self.ctx, p))
            .collect()
    }

    /// Components of `ds = dH/H`.
    pub fn ds_form(&self) -> Vec<LaurentH> {
        (0..self.nvars)
            .map(|a| LaurentH::from_part(&self.ctx, 1, self.ctx.h_partial(a).clone()))
            .collect()
    }

    /// Components of `alpha = (i_S mu)/H` (`alpha_b = mu_{cb} S^c / H`).
    pub fn alpha_form(&self) -> Vec<LaurentH> {
        let s = self.s_components();
        (0..self.nvars)
            .map(|b| {
                let mut p = MultiPoly::zero(self.nvars);
                for c in 0..self.nvars {
                    if !self.mu[c][b].is_zero() {
                        p.add_assign(&s[c].scale(&self.mu[c][b]));
                    }
                }
                LaurentH::from_part(&self.ctx, 1, p)
            })
            .collect()
    }

    // ---- Derivations ----

    /// Applies the halved Euler field: `S(f) = 1/2 x^a d_a f`.
    pub fn s_apply(&self, f: &LaurentH) -> LaurentH {
        let mut out = LaurentH::zero(&self.ctx);
        for a in 0..self.nvars {
            let df = f.partial(a);
            if df.is_zero() {
                continue;
            }
            out = out.add(
                &df.mul_poly(&MultiPoly::var(self.nvars, a))
                    .scale(&scalar::ratio(1, 2)),
            );
        }
        out
    }

    /// Applies the Hamiltonian field of `H`.
    pub fn xh_apply(&self, f: &LaurentH) -> LaurentH {
        let mut out = LaurentH::zero(&self.ctx);
        for b in 0..self.nvars {
            let df = f.partial(b);
            if df.is_zero() {
                continue;
            }
            let mut coeff = MultiPoly::zero(self.nvars);
            for a in 0..self.nvars {
                if !self.xh_matrix[b][a].is_zero() {
                    coeff.add_assign(&MultiPoly::var(self.nvars, a).scale(&self.xh_matrix[b][a]));
                }
            }
            out = out.add(&df.mul_poly(&coeff));
        }
        out
    }

    /// Poisson bracket `{f, g} = Lambda^{ab} d_a f d_b g`.
    pub fn poisson(&self, f: &LaurentH, g: &LaurentH) -> LaurentH {
        let mut out = LaurentH::zero(&self.ctx);
        for (a, row) in self.lambda_sparse.iter().enumerate() {
            let fa = f.partial(a);
            if fa.is_zero() {
                continue;
            }
            for (b, coeff) in row {
                let gb = g.partial(*b);
                if gb.is_zero() {
                    continue;
                }
                out = out.add(&fa.mul(&gb).scale(coeff));
            }
        }
        out
    }

    /// True iff `X_H f = 0`.
    pub fn is_invariant(&self, f: &LaurentH) -> bool {
        self.xh_apply(f).is_zero()
    }

    /// True iff `S f = 0`, i.e. homogeneity degree zero.
    pub fn is_degree_zero(&self, f: &LaurentH) -> bool {
        f.is_degree_zero()
    }

    /// Evaluates `ds` on a vector with Laurent components.
    pub fn ds_of(&self, v: &[LaurentH]) -> LaurentH {
        let mut num = LaurentH::zero(&self.ctx);
        for a in 0..self.nvars {
            if v[a].is_zero() {
                continue;
            }
            num = num.add(&v[a].mul_poly(self.ctx.h_partial(a)));
        }
        num.shift_hpow(-1)
    }

    /// Evaluates `alpha` on a vector with Laurent components.
    pub fn alpha_of(&self, v: &[LaurentH]) -> LaurentH {
        let s = self.s_components();
        let mut num = LaurentH::zero(&self.ctx);
        for b in 0..self.nvars {
            if v[b].is_zero() {
                continue;
            }
            let mut coeff = MultiPoly::zero(self.nvars);
            for c in 0..self.nvars {
                if !self.mu[c][b].is_zero() {
                    coeff.add_assign(&s[c].scale(&self.mu[c][b]));
                }
            }
            if !coeff.is_zero() {
                num = num.add(&v[b].mul_poly(&coeff));
            }
        }
        num.shift_hpow(-1)
    }

    /// `mu(u, v)` for vectors with Laurent components.
    pub fn mu_of(&self, u: &[LaurentH], v: &[LaurentH]) -> LaurentH {
        let mut out = LaurentH::zero(&self.ctx);
        for a in 0..self.nvars {
            if u[a].is_zero() {
                continue;
            }
            for b in 0..self.nvars {
                if self.mu[a][b].is_zero() || v[b].is_zero() {
                    continue;
                }
                out = out.add(&u[a].mul(&v[b]).scale(&self.mu[a][b]));
            }
        }
        out
    }

    /// `G(u, v)` (the flat Hessian of `H` as a bilinear form).
    pub fn g_of(&self, u: &[LaurentH], v: &[LaurentH]) -> LaurentH {
        let mut out = LaurentH::zero(&self.ctx);
        for a in 0..self.nvars {
            if u[a].is_zero() || v[a].is_zero() {
                continue;
            }
            out = out.add(&u[a].mul(&v[a]).scale(&self.g_diag[a]));
        }
        out
    }

    /// Serialized form per the external interface.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "n": self.n, "signature": self.signature })
    }

    /// Basis of the invariant quadratic forms: symmetric `Q` with
    /// `A^T Q + Q A = 0` where `X_H = A x`. These generate, after
    /// division by powers of `H`, the invariant degree-zero functions
    /// used throughout the reduction. The momentum `H` itself is in
    /// the span.
    pub fn invariant_quadratic_basis(&self) -> Vec<MultiPoly> {
        let n = self.nvars;
        let a = &self.xh_matrix;
        // unknowns: Q_{ij} for i <= j
        let mut unknown_of = vec![vec![0usize; n]; n];
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i..n {
                unknown_of[i][j] = pairs.len();
                unknown_of[j][i] = pairs.len();
                pairs.push((i, j));
            }
        }
        let ncols = pairs.len();
        // one equation per (r <= c): (A^T Q + Q A)[r][c] = 0
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        for r in 0..n {
            for c in r..n {
                let mut row = vec![scalar::zero(); ncols];
                for k in 0..n {
                    // A[k][r] Q[k][c]
                    if !a[k][r].is_zero() {
                        row[unknown_of[k][c]] += a[k][r].clone();
                    }
                    // Q[r][k] A[k][c]
                    if !a[k][c].is_zero() {
                        row[unknown_of[r][k]] += a[k][c].clone();
                    }
                }
                if row.iter().any(|v| !v.is_zero()) {
                    rows.push(row);
                }
            }
        }
        // Gaussian elimination to reduced row echelon form
        let mut pivot_cols = Vec::new();
        let mut r = 0usize;
        for c in 0..ncols {
            let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let inv = rows[r][c].clone().recip();
            for v in rows[r].iter_mut() {
                *v = v.clone() * inv.clone();
            }
            for i in 0..rows.len() {
                if i != r && !rows[i][c].is_zero() {
                    let f = rows[i][c].clone();
                    for j in 0..ncols {
                        let sub = rows[r][j].clone() * f.clone();
                        rows[i][j] = rows[i][j].clone() - sub;
                    }
                }
            }
            pivot_cols.push(c);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        // free columns parametrize the nullspace
        let mut basis = Vec::new();
        for free in 0..ncols {
            if pivot_cols.contains(&free) {
                continue;
            }
            let mut q = vec![scalar::zero(); ncols];
            q[free] = scalar::one();
            for (rank, &pc) in pivot_cols.iter().enumerate() {
                q[pc] = -rows[rank][free].clone();
            }
            // assemble x^T Q x
            let mut w = MultiPoly::zero(n);
            for (idx, &(i, j)) in pairs.iter().enumerate() {
                if q[idx].is_zero() {
                    continue;
                }
                let mut e = vec![0u32; n];
                e[i] += 1;
                e[j] += 1;
                let coeff = if i == j {
                    q[idx].clone()
                } else {
                    q[idx].clone() * scalar::int(2)
                };
                w.add_assign(&MultiPoly::monomial(n, e, coeff));
            }
            basis.push(w);
        }
        basis
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> FlatModel {
        FlatModel::build(2, &[1, 1, 1, 1, 1, 1]).unwrap()
    }

    #[test]
    fn rejects_bad_signature() {
        assert!(FlatModel::build(2, &[1, 1, 0, 1, 1, 1]).is_err());
        assert!(FlatModel::build(2, &[1, 1, 1]).is_err());
        assert!(FlatModel::build(0, &[1, 1]).is_err());
    }

    #[test]
    fn canonical_bracket() {
        let m = model();
        let q0 = LaurentH::from_poly(m.ctx(), MultiPoly::var(6, m.q_index(0)));
        let p0 = LaurentH::from_poly(m.ctx(), MultiPoly::var(6, m.p_index(0)));
        assert_eq!(m.poisson(&q0, &p0), LaurentH::one(m.ctx()));
        assert_eq!(m.poisson(&p0, &q0), LaurentH::one(m.ctx()).neg());
    }

    #[test]
    fn ds_and_alpha_normalization() {
        let m = model();
        let s = m.s_vector();
        let xh = m.xh_vector();
        assert_eq!(m.ds_of(&s), LaurentH::one(m.ctx()));
        assert!(m.ds_of(&xh).is_zero());
        assert!(m.alpha_of(&s).is_zero());
        assert_eq!(m.alpha_of(&xh), LaurentH::one(m.ctx()).neg());
    }

    #[test]
    fn momentum_field_pairing() {
        // mu(X_H, S) = H and X_H(H) = 0
        let m = model();
        let s = m.s_vector();
        let xh = m.xh_vector();
        assert_eq!(m.mu_of(&xh, &s), m.h());
        assert!(m.xh_apply(&m.h()).is_zero());
        assert_eq!(m.s_apply(&m.h()), m.h());
    }

    #[test]
    fn invariant_quadratics_span() {
        let m = model();
        let basis = m.invariant_quadratic_basis();
        // the commutant of the complex structure has dimension (n+1)^2
        assert_eq!(basis.len(), (m.n() + 1) * (m.n() + 1));
        for w in &basis {
            let f = LaurentH::from_poly(m.ctx(), w.clone());
            assert!(m.is_invariant(&f));
            assert!(w.is_homogeneous_of(2));
        }
        // matched indefinite signature still has a full commutant
        let mi = FlatModel::build(1, &[1, -1, 1, -1]).unwrap();
        let basis = mi.invariant_quadratic_basis();
        assert!(!basis.is_empty());
        for w in &basis {
            let f = LaurentH::from_poly(mi.ctx(), w.clone());
            assert!(mi.is_invariant(&f));
        }
    }

    #[test]
    fn invariance_of_h_powers() {
        let m = model();
        let f = LaurentH::h_inv_pow(m.ctx(), 2);
        assert!(m.is_invariant(&f));
        assert!(m.is_degree_zero(&LaurentH::one(m.ctx())));
        let q0 = LaurentH::from_poly(m.ctx(), MultiPoly::var(6, m.q_index(0)));
        assert!(!m.is_invariant(&q0));
    }
}
