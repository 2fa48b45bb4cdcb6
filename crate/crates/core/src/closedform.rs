//! The second-order operator, derived curvature scalars, the
//! closed-form recursion for the reduced product and the second-order
//! theorems.
//!
//! The operator `Delta f = C_2(f, H)` controls the quantum corrections:
//! on invariant functions `(kq - d) f = (nu^2/8) Delta f`, and the
//! quantum restriction collapses to `i* (id + (nu^2/8) Delta h)^{-1}`.
//! On the class `H^-k u` with `u` invariant degree zero both `h` and
//! `Delta` act by closed formulas, which yields a second, much cheaper
//! construction of the reduced product that must agree with the generic
//! Koszul reduction order by order.
//!
//! All base-curvature data (the function `phi`, the scalar `f`, the
//! vector `U`, `tr(rho^2)` and the constant `K`) is derived from the
//! model, never hard-coded, and cross-checked between two independent
//! routes: the Hessian decomposition plus `Delta`-inversion on one
//! side, contraction of the lifted Ricci endomorphism on the other.

use crate::error::{Error, Result};
use crate::frame::{self, FrameTensor};
use crate::koszul::{self, ReducedFunction};
use crate::laurent::{LaurentAcc, LaurentH};
use crate::model::FlatModel;
use crate::moyal::{self, c_r};
use crate::scalar::{self, Scalar};
use crate::series::NuSeries;

/// `Delta f = C_2(f, H)` on a single function.
pub fn delta_laurent(m: &FlatModel, f: &LaurentH) -> LaurentH {
    c_r(m, f, &m.h(), 2)
}

/// `Delta` applied coefficient-wise to a series.
pub fn delta_op(m: &FlatModel, f: &NuSeries) -> NuSeries {
    f.map(|c| delta_laurent(m, c))
}

// ---- Lifted curvature tensors ----

/// Lifted tensors entering the explicit form of `Delta`: the symmetric
/// `t`, the Ricci form `Ric = (n+1) t`, its double raise `Ric#`, the
/// vector `V` and the function `phi`.
pub struct LiftedCurvature {
    pub t_lift: FrameTensor,
    pub ric_lift: FrameTensor,
    pub ric_sharp: FrameTensor,
    pub v_lift: FrameTensor,
    pub phi: LaurentH,
}

pub fn lifted_curvature(m: &FlatModel) -> Result<LiftedCurvature> {
    let hd = frame::hessian_decompose(m)?;
    let b = frame::reduced_bivector(m);
    let n = m.nvars();
    let np1 = scalar::int(m.n() as i64 + 1);
    let ric_matrix: Vec<Vec<LaurentH>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|c| hd.t_lift.entry2(a, c).scale(&np1))
                .collect()
        })
        .collect();
    let ric_lift = FrameTensor::symmetric_form(ric_matrix);
    // Ric#^{ab} = B^{ac} Ric_{cd} B^{bd}
    let mut sharp = vec![vec![LaurentH::zero(m.ctx()); n]; n];
    // first contract: W^{a}_{d} = B^{ac} Ric_{cd}
    let mut w = vec![vec![LaurentH::zero(m.ctx()); n]; n];
    for a in 0..n {
        for d in 0..n {
            let mut acc = LaurentH::zero(m.ctx());
            for c in 0..n {
                acc = acc.add(&b.entry2(a, c).mul(ric_lift.entry2(c, d)));
            }
            w[a][d] = acc;
        }
    }
    for a in 0..n {
        for bb in 0..n {
            let mut acc = LaurentH::zero(m.ctx());
            for d in 0..n {
                acc = acc.add(&w[a][d].mul(b.entry2(bb, d)));
            }
            sharp[a][bb] = acc;
        }
    }
    let ric_sharp = FrameTensor::symmetric_form(sharp);
    Ok(LiftedCurvature {
        t_lift: hd.t_lift,
        ric_lift,
        ric_sharp,
        v_lift: hd.v_lift,
        phi: hd.phi,
    })
}

fn contract2_with_hessian(t: &FrameTensor, f: &LaurentH) -> LaurentH {
    let n = t.dims();
    let ctx = f.ctx().clone();
    let mut acc = LaurentAcc::new(&ctx);
    for a in 0..n {
        let da = f.partial(a);
        if da.is_zero() {
            continue;
        }
        for bb in 0..n {
            let e = t.entry2(a, bb);
            if e.is_zero() {
                continue;
            }
            let dab = da.partial(bb);
            if dab.is_zero() {
                continue;
            }
            acc.add_product_scaled(e, &dab, &scalar::one());
        }
    }
    acc.finish()
}

fn contract2_pairing(s: &FrameTensor, t: &FrameTensor) -> LaurentH {
    let n = s.dims();
    let ctx = s.entry2(0, 0).ctx().clone();
    let mut acc = LaurentAcc::new(&ctx);
    for a in 0..n {
        for bb in 0..n {
            acc.add_product_scaled(s.entry2(a, bb), t.entry2(a, bb), &scalar::one());
        }
    }
    acc.finish()
}

fn lie_along(v: &FrameTensor, f: &LaurentH) -> LaurentH {
    let comps = v.as_vector();
    let ctx = f.ctx().clone();
    let mut acc = LaurentAcc::new(&ctx);
    for (a, c) in comps.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let df = f.partial(a);
        if !df.is_zero() {
            acc.add_product_scaled(c, &df, &scalar::one());
        }
    }
    acc.finish()
}

/// The horizontal Ricci operator on cone functions: the
/// `Ric#`-contraction of the flat Hessian plus two trace corrections
/// proportional to `S f` - one from rewriting the frame second
/// derivatives through the flat connection (which contributes
/// `+<Ric#, t> S f`), one from the Ricci term of the horizontal
/// expression (`-(1/(n+1)) <Ric#, Ric> S f`). Since `Ric = (n+1) t`
/// these cancel; both are computed from lifted data rather than
/// assumed away.
pub fn delta_ric_horizontal(m: &FlatModel, lc: &LiftedCurvature, f: &LaurentH) -> LaurentH {
    let main = contract2_with_hessian(&lc.ric_sharp, f);
    let sf = m.s_apply(f);
    if sf.is_zero() {
        return main;
    }
    let tr_t = contract2_pairing(&lc.ric_sharp, &lc.t_lift);
    let tr_ric = contract2_pairing(&lc.ric_sharp, &lc.ric_lift)
        .scale(&scalar::ratio(-1, m.n() as i64 + 1));
    main.add(&tr_t.add(&tr_ric).mul(&sf))
}

/// Verifies the explicit second-order formula: `C_2(f, H)` equals
/// `(1/H) ( -(1/(n+1)) DeltaRic^hor f - 1/2 L_V f - phi L_S^2 f
///   + (L_V L_S + L_S L_V) f + 1/2 L_{X_H}^2 f )`
/// for invariant `f`.
pub fn delta_explicit_check(m: &FlatModel, f: &LaurentH) -> Result<bool> {
    let w = m.xh_apply(f);
    if !w.is_zero() {
        return Err(Error::NotInvariant {
            order: 0,
            witness: w.to_string(),
        });
    }
    let lc = lifted_curvature(m)?;
    let np1 = m.n() as i64 + 1;

    let mut rhs = delta_ric_horizontal(m, &lc, f).scale(&scalar::ratio(-1, np1));
    let lv_f = lie_along(&lc.v_lift, f);
    rhs = rhs.sub(&lv_f.scale(&scalar::ratio(1, 2)));
    let sf = m.s_apply(f);
    rhs = rhs.sub(&lc.phi.mul(&m.s_apply(&sf)));
    rhs = rhs.add(&lie_along(&lc.v_lift, &sf));
    rhs = rhs.add(&m.s_apply(&lv_f));
    let xxf = m.xh_apply(&m.xh_apply(f));
    rhs = rhs.add(&xxf.scale(&scalar::ratio(1, 2)));
    let rhs = rhs.shift_hpow(-1);

    Ok(delta_laurent(m, f) == rhs)
}

// ---- Derived scalars ----

/// The base curvature scalars of the implemented family, all derived:
/// `phi` (constant by family), `f = phi (n+1)(2n+1)/4`, the vectors `V`
/// and `U = (n+1)(2n+1)/2 V`, `tr(rho^2)` and
/// `K = tr(rho^2) + 4(n+1) f/(2n+1)`.
pub struct GeometryScalars {
    pub n: usize,
    pub phi: Scalar,
    pub f_scalar: Scalar,
    pub v_lift: FrameTensor,
    pub u_lift: FrameTensor,
    pub tr_rho_sq: Scalar,
    pub k_scalar: Scalar,
}

impl GeometryScalars {
    /// The Ricci operator of the base, defined operationally by
    /// inverting the action of `Delta` on pull-backs:
    /// `DeltaRic u = -(n+1) i*(H Delta u) - (1/(2n+1)) L_U u`.
    pub fn delta_ric(&self, m: &FlatModel, u: &LaurentH) -> Result<LaurentH> {
        let d = delta_laurent(m, u);
        let core = koszul::laurent_restrict_extend(&d.shift_hpow(1))?
            .scale(&scalar::int(-(self.n as i64 + 1)));
        let lu = lie_along(&self.u_lift, u).scale(&scalar::ratio(1, 2 * self.n as i64 + 1));
        Ok(core.sub(&lu))
    }
}

/// Derives all scalars and runs the structural cross-checks: constancy
/// of `phi`, agreement of `tr(rho^2)` between the `Delta`-route and the
/// Ricci-contraction route, and the exact coefficient pattern in `k` of
/// `Delta(H^-k u)` for `k <= 3`.
pub fn derive_scalars(m: &FlatModel) -> Result<GeometryScalars> {
    let lc = lifted_curvature(m)?;
    let n = m.n() as i64;
    let inconsistency = |check: &str, detail: String| Error::ModelInconsistency {
        check: check.into(),
        detail,
    };

    let phi = lc
        .phi
        .as_constant()
        .ok_or_else(|| inconsistency("phi_constant", format!("phi = {}", lc.phi)))?;
    let f_scalar = phi.clone() * scalar::ratio((n + 1) * (2 * n + 1), 4);
    let u_comps: Vec<LaurentH> = lc
        .v_lift
        .as_vector()
        .iter()
        .map(|c| c.scale(&scalar::ratio((n + 1) * (2 * n + 1), 2)))
        .collect();
    let u_lift = FrameTensor::vector(u_comps);

    // tr(rho^2) via Delta(H^-1): -(n+1) H^2 Delta(H^-1) = tr/(n+1) + 4f/(2n+1)
    let d = delta_laurent(m, &LaurentH::h_inv_pow(m.ctx(), 1));
    let c = d.shift_hpow(2).scale(&scalar::int(-(n + 1)));
    let c = c.as_constant().ok_or_else(|| {
        inconsistency("delta_h_inverse", format!("H^2 Delta(H^-1) not constant: {}", d))
    })?;
    let tr_delta = (c - f_scalar.clone() * scalar::ratio(4, 2 * n + 1)) * scalar::int(n + 1);

    // tr(rho^2) via the lifted Ricci pairing: the scalar entering the
    // curvature identities is <Ric#, Ric>, which equals minus the
    // matrix trace of (B Ric)^2
    let tr_geom = contract2_pairing(&lc.ric_sharp, &lc.ric_lift);
    let tr_geom = tr_geom.as_constant().ok_or_else(|| {
        inconsistency("tr_rho_sq_geometric", "lifted Ricci pairing not constant".into())
    })?;
    if tr_geom != tr_delta {
        return Err(inconsistency(
            "tr_rho_sq_agreement",
            format!("geometric {} vs Delta-route {}", tr_geom, tr_delta),
        ));
    }
    let k_scalar = tr_delta.clone() + scalar::ratio(4 * (n + 1), 2 * n + 1) * f_scalar.clone();

    let gs = GeometryScalars {
        n: m.n(),
        phi,
        f_scalar,
        v_lift: lc.v_lift,
        u_lift,
        tr_rho_sq: tr_delta,
        k_scalar,
    };

    // coefficient pattern in k: Delta(H^-k u) =
    //   -(1/(n+1)) H^-(k+1) ( DeltaRic u + (4k+1)/(2n+1) L_U u
    //      + k/(n+1) tr(rho^2) u + 4k^2/(2n+1) f u )
    let basis = m.invariant_quadratic_basis();
    let mut samples = vec![LaurentH::one(m.ctx())];
    for w in basis.iter().take(2) {
        samples.push(LaurentH::from_part(m.ctx(), 1, w.clone()));
    }
    if basis.len() >= 2 {
        samples.push(LaurentH::from_part(m.ctx(), 2, basis[0].mul(&basis[1])));
    }
    for u in &samples {
        let dric = gs.delta_ric(m, u)?;
        let lu = lie_along(&gs.u_lift, u);
        for k in 0..=3i64 {
            let lhs = delta_laurent(m, &u.shift_hpow(-k));
            let mut inner = dric.clone();
            inner = inner.add(&lu.scale(&scalar::ratio(4 * k + 1, 2 * n + 1)));
            inner = inner.add(&u.scale(&(scalar::ratio(k, n + 1) * gs.tr_rho_sq.clone())));
            inner = inner.add(&u.scale(&(scalar::ratio(4 * k * k, 2 * n + 1) * gs.f_scalar.clone())));
            let rhs = inner
                .scale(&scalar::ratio(-1, n + 1))
                .shift_hpow(-(k + 1));
            if lhs != rhs {
                return Err(inconsistency(
                    "delta_k_pattern",
                    format!("k = {}, u = {}: lhs = {}, rhs = {}", k, u, lhs, rhs),
                ));
            }
        }
    }

    Ok(gs)
}

// ---- Closed forms on the H-power class ----

/// `h(H^-k u) = -(H^-1 + ... + H^-k) u` for invariant degree-zero `u`;
/// the sum is empty at `k = 0` where `h` annihilates pull-backs.
pub fn h_on_h_powers(m: &FlatModel, u: &LaurentH, k: u32) -> Result<LaurentH> {
    let w = m.xh_apply(u);
    if !w.is_zero() {
        return Err(Error::NotInvariant {
            order: 0,
            witness: w.to_string(),
        });
    }
    if !u.is_degree_zero() {
        return Err(Error::NotDegreeZero {
            order: 0,
            witness: m.s_apply(u).to_string(),
        });
    }
    let mut acc = LaurentH::zero(m.ctx());
    for j in 1..=k {
        acc = acc.add(&u.shift_hpow(-(j as i64)));
    }
    Ok(acc.neg())
}

/// The reduced product through the explicit recursion: the order-`r`
/// coefficient is `i* sum_{2s+t=r} (-1/8)^s (Delta h)^s W_t` where
/// `W` is the star product of the pull-backs. Both `h` and `Delta`
/// stay inside the `H^-k u` class, so every step is a closed formula.
/// Inputs must be parameter-free.
pub fn fast_reduced_product(
    m: &FlatModel,
    u: &ReducedFunction,
    v: &ReducedFunction,
) -> Result<ReducedFunction> {
    u.series().classical()?;
    v.series().classical()?;
    let big = moyal::moyal(m, u.series(), v.series())?;
    let order = big.order();
    let mut coeffs = Vec::with_capacity(order + 1);
    for r in 0..=order {
        let mut acc = LaurentH::zero(m.ctx());
        let mut s = 0usize;
        while 2 * s <= r {
            let t = r - 2 * s;
            let mut term = big.coeff(t).clone();
            for _ in 0..s {
                term = delta_laurent(m, &koszul::laurent_homotopy(&term)?);
            }
            acc = acc.add(&term.scale(&scalar::ratio(-1, 8).pow(s as i32)));
            s += 1;
        }
        coeffs.push(koszul::laurent_restrict_extend(&acc)?);
    }
    ReducedFunction::certify(m, NuSeries::from_coeffs(coeffs))
}

/// The specialized quantum restriction
/// `qi f = i* (id + (nu^2/8) Delta h)^{-1} f` valid on invariant input.
pub fn quantum_restriction_invariant(m: &FlatModel, f: &NuSeries) -> Result<NuSeries> {
    let mut acc = f.clone();
    let mut term = f.clone();
    loop {
        // term <- -(nu^2/8) Delta h term
        let ht = term.try_map(|c| koszul::laurent_homotopy(c))?;
        term = delta_op(m, &ht)
            .shift_nu(2)
            .scale(&scalar::ratio(-1, 8));
        if term.is_zero() {
            break;
        }
        acc = acc.add(&term);
    }
    acc.try_map(|c| koszul::laurent_restrict_extend(c))
}

// ---- Second-order theorems ----

/// The over-cross pairing of the reduced bivector with the flat
/// Hessians: `B^{i1 j1} B^{i2 j2} (d^2 u)_{i1 i2} (d^2 v)_{j1 j2}`.
fn bivector_hessian_pairing(m: &FlatModel, u: &LaurentH, v: &LaurentH) -> LaurentH {
    let nv = m.nvars();
    let b = frame::reduced_bivector(m);
    let d2 = |f: &LaurentH| -> Vec<Vec<LaurentH>> {
        (0..nv)
            .map(|a| {
                let da = f.partial(a);
                (0..nv).map(|c| da.partial(c)).collect()
            })
            .collect()
    };
    let d2u = d2(u);
    let d2v = d2(v);
    // W[i1][j2] = sum_{j1} B^{i1 j1} (d2v)[j1][j2]
    let mut w = vec![vec![LaurentH::zero(m.ctx()); nv]; nv];
    for i1 in 0..nv {
        for j2 in 0..nv {
            let mut acc = LaurentAcc::new(m.ctx());
            for j1 in 0..nv {
                acc.add_product_scaled(b.entry2(i1, j1), &d2v[j1][j2], &scalar::one());
            }
            w[i1][j2] = acc.finish();
        }
    }
    // X[i2][j2] = sum_{i1} (d2u)[i1][i2] W[i1][j2]
    let mut acc = LaurentAcc::new(m.ctx());
    for i2 in 0..nv {
        for j2 in 0..nv {
            let mut x = LaurentAcc::new(m.ctx());
            for i1 in 0..nv {
                x.add_product_scaled(&d2u[i1][i2], &w[i1][j2], &scalar::one());
            }
            let x = x.finish();
            acc.add_product_scaled(&x, b.entry2(i2, j2), &scalar::one());
        }
    }
    acc.finish()
}

/// The second-order coefficient of the reduced product equals
/// the over-cross Hessian pairing plus `(2/(n+1)) <Ric#, du (x) dv>`,
/// the latter evaluated through the polarization of the Ricci
/// operator. Inputs are parameter-free invariant degree-zero functions.
pub fn second_order_check(
    m: &FlatModel,
    gs: &GeometryScalars,
    u: &LaurentH,
    v: &LaurentH,
) -> Result<bool> {
    let order = 2;
    let uf = ReducedFunction::classical(m, u.clone(), order)?;
    let vf = ReducedFunction::classical(m, v.clone(), order)?;
    let c2_red = koszul::extract_operators(m, &uf, &vf, 2)?.c_red;

    let term1 = bivector_hessian_pairing(m, u, v);
    // polarization: DeltaRic(uv) - u DeltaRic v - v DeltaRic u = 2 Ric^{ij} d_i u d_j v
    let pol = gs
        .delta_ric(m, &u.mul(v))?
        .sub(&u.mul(&gs.delta_ric(m, v)?))
        .sub(&v.mul(&gs.delta_ric(m, u)?));
    let term2 = pol.scale(&scalar::ratio(1, gs.n as i64 + 1));

    Ok(c2_red == term1.add(&term2))
}

/// Verifies the table of second covariant derivatives of pull-backs:
/// with `T = flat Hessian of u`,
/// `T(hor, X_H) = -du(tau hor)`, `T(hor, S) = -1/2 du(hor)`,
/// `T(X_H, X_H) = du(V)`, `T(X_H, S) = 0`, `T(S, S) = 0`.
pub fn pullback_hessian_table_check(m: &FlatModel, u: &LaurentH) -> Result<bool> {
    let w = m.xh_apply(u);
    if !w.is_zero() {
        return Err(Error::NotInvariant {
            order: 0,
            witness: w.to_string(),
        });
    }
    if !u.is_degree_zero() {
        return Err(Error::NotDegreeZero {
            order: 0,
            witness: m.s_apply(u).to_string(),
        });
    }
    let nv = m.nvars();
    let hd = frame::hessian_decompose(m)?;
    let b = frame::reduced_bivector(m);
    let tau = frame::tau_lift(&b, &hd.t_lift);
    let frame_fields = frame::projected_frame(m);
    let s = m.s_vector();
    let xh = m.xh_vector();

    let grad: Vec<LaurentH> = (0..nv).map(|a| u.partial(a)).collect();
    let hess: Vec<Vec<LaurentH>> = (0..nv)
        .map(|a| (0..nv).map(|c| grad[a].partial(c)).collect())
        .collect();
    let pair = |x: &[LaurentH], y: &[LaurentH]| -> LaurentH {
        let mut acc = LaurentAcc::new(m.ctx());
        for a in 0..nv {
            if x[a].is_zero() {
                continue;
            }
            for c in 0..nv {
                if y[c].is_zero() || hess[a][c].is_zero() {
                    continue;
                }
                let t = x[a].mul(&y[c]);
                acc.add_product_scaled(&t, &hess[a][c], &scalar::one());
            }
        }
        acc.finish()
    };
    let du_of = |x: &[LaurentH]| -> LaurentH {
        let mut acc = LaurentAcc::new(m.ctx());
        for a in 0..nv {
            if x[a].is_zero() || grad[a].is_zero() {
                continue;
            }
            acc.add_product_scaled(&x[a], &grad[a], &scalar::one());
        }
        acc.finish()
    };

    for a in 0..nv {
        // (nabla_{hor} d pr*u)(X_H) = -pr*(du(tau .))
        let mut tau_a = vec![LaurentH::zero(m.ctx()); nv];
        for i in 0..nv {
            let mut acc = LaurentH::zero(m.ctx());
            for c in 0..nv {
                acc = acc.add(&tau.entry2(i, c).mul(&frame_fields[a][c]));
            }
            tau_a[i] = acc;
        }
        if pair(&frame_fields[a], &xh) != du_of(&tau_a).neg() {
            return Ok(false);
        }
        // (nabla_{hor} d pr*u)(S) = -1/2 pr*(du(.))
        if pair(&frame_fields[a], &s) != du_of(&frame_fields[a]).scale(&scalar::ratio(-1, 2)) {
            return Ok(false);
        }
    }
    // (X_H, X_H) block equals du(V)
    if pair(&xh, &xh) != du_of(hd.v_lift.as_vector()) {
        return Ok(false);
    }
    // S-pure blocks vanish
    if !pair(&xh, &s).is_zero() || !pair(&s, &s).is_zero() {
        return Ok(false);
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MultiPoly;

    fn model() -> FlatModel {
        FlatModel::build(2, &[1; 6]).unwrap()
    }

    fn inv_quad(m: &FlatModel) -> MultiPoly {
        let nv = m.nvars();
        let q0 = MultiPoly::var(nv, m.q_index(0));
        let q1 = MultiPoly::var(nv, m.q_index(1));
        let p0 = MultiPoly::var(nv, m.p_index(0));
        let p1 = MultiPoly::var(nv, m.p_index(1));
        &(&q0 * &q1) + &(&p0 * &p1)
    }

    #[test]
    fn delta_on_constants_and_h_inverse() {
        let m = model();
        assert!(delta_laurent(&m, &LaurentH::one(m.ctx())).is_zero());
        // definite family, n = 2: Delta(H^-1) = -2(n-1) H^-2 = -2 H^-2
        let d = delta_laurent(&m, &LaurentH::h_inv_pow(m.ctx(), 1));
        let expect = LaurentH::h_inv_pow(m.ctx(), 2).scale(&scalar::int(-2));
        assert_eq!(d, expect);
        // Delta commutes with X_H on a sample
        let f = LaurentH::from_part(m.ctx(), 2, inv_quad(&m).mul(&inv_quad(&m)));
        assert_eq!(
            delta_laurent(&m, &m.xh_apply(&f)),
            m.xh_apply(&delta_laurent(&m, &f))
        );
    }

    #[test]
    fn derived_scalar_values_definite_n2() {
        let m = model();
        let gs = derive_scalars(&m).unwrap();
        assert_eq!(gs.phi, scalar::int(-2));
        assert_eq!(gs.f_scalar, scalar::ratio(-15, 2));
        assert_eq!(gs.tr_rho_sq, scalar::int(36));
        assert_eq!(gs.k_scalar, scalar::int(18));
        assert!(gs.v_lift.as_vector().iter().all(|c| c.is_zero()));
        assert!(gs.u_lift.as_vector().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn delta_on_pullbacks_lands_in_h_inverse_class() {
        let m = model();
        let gs = derive_scalars(&m).unwrap();
        let u = LaurentH::from_part(m.ctx(), 1, inv_quad(&m));
        // Delta(pr*u) = -(1/(n+1)) H^-1 pr*(DeltaRic u) when U = 0
        let d = delta_laurent(&m, &u);
        let dric = gs.delta_ric(&m, &u).unwrap();
        assert_eq!(
            d,
            dric.scale(&scalar::ratio(-1, 3)).shift_hpow(-1)
        );
        assert!(m.is_invariant(&dric));
        assert!(dric.is_degree_zero());
    }

    #[test]
    fn explicit_second_order_formula() {
        let m = model();
        // f = H^-1 exercises the S-dependence
        assert!(delta_explicit_check(&m, &LaurentH::h_inv_pow(m.ctx(), 1)).unwrap());
        // pull-back
        let u = LaurentH::from_part(m.ctx(), 1, inv_quad(&m));
        assert!(delta_explicit_check(&m, &u).unwrap());
        // explicit S-degree: H * u has L_S-eigenvalue one
        assert!(delta_explicit_check(&m, &u.shift_hpow(1)).unwrap());
        // the momentum itself
        assert!(delta_explicit_check(&m, &m.h()).unwrap());
        // non-invariant input rejected
        let nv = m.nvars();
        let bad = LaurentH::from_poly(m.ctx(), MultiPoly::var(nv, 0));
        assert!(delta_explicit_check(&m, &bad).is_err());
    }

    #[test]
    fn homotopy_closed_form_on_h_powers() {
        let m = model();
        let u = LaurentH::from_part(m.ctx(), 1, inv_quad(&m));
        assert!(h_on_h_powers(&m, &u, 0).unwrap().is_zero());
        for k in 1..=4u32 {
            let closed = h_on_h_powers(&m, &u, k).unwrap();
            let generic = koszul::laurent_homotopy(&u.shift_hpow(-(k as i64))).unwrap();
            assert_eq!(closed, generic, "k = {}", k);
        }
    }

    #[test]
    fn lemma_kq_minus_d_is_delta() {
        // (kq - d) f = (nu^2/8) Delta f on invariant f
        let m = model();
        let u = LaurentH::from_part(m.ctx(), 1, inv_quad(&m));
        let f = NuSeries::from_constant(u.mul(&u).shift_hpow(-1).add(&m.h()), 4);
        assert!(f.coeffs().iter().all(|c| m.is_invariant(c)));
        let lhs = koszul::koszul_quantum(&m, &f).sub(&koszul::koszul_classical(&m, &f));
        let rhs = delta_op(&m, &f).shift_nu(2).scale(&scalar::ratio(1, 8));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn specialized_quantum_restriction_agrees() {
        let m = model();
        let u = LaurentH::from_part(m.ctx(), 1, inv_quad(&m));
        let f = NuSeries::from_constant(
            u.mul(&u).shift_hpow(-2).add(&m.h().mul(&m.h())),
            4,
        );
        let generic = koszul::quantum_restriction(&m, &f).unwrap().into_series();
        let special = quantum_restriction_invariant(&m, &f).unwrap();
        assert_eq!(generic, special);
    }

    #[test]
    fn fast_product_matches_generic_reduction() {
        let m = model();
        let basis = m.invariant_quadratic_basis();
        let u = ReducedFunction::classical(
            &m,
            LaurentH::from_part(m.ctx(), 1, basis[0].clone()),
            4,
        )
        .unwrap();
        let v = ReducedFunction::classical(
            &m,
            LaurentH::from_part(m.ctx(), 2, basis[1].mul(&basis[2])),
            4,
        )
        .unwrap();
        let direct = koszul::reduced_product(&m, &u, &v).unwrap();
        let fast = fast_reduced_product(&m, &u, &v).unwrap();
        assert_eq!(direct, fast);
        // unit
        let one = ReducedFunction::one(&m, 4);
        assert_eq!(fast_reduced_product(&m, &one, &v).unwrap(), v);
    }

    #[test]
    fn second_order_theorem_examples() {
        let m = model();
        let gs = derive_scalars(&m).unwrap();
        let u = LaurentH::from_part(m.ctx(), 1, inv_quad(&m));
        // u = v
        assert!(second_order_check(&m, &gs, &u, &u).unwrap());
        // constant argument: both sides vanish
        let one = LaurentH::one(m.ctx());
        assert!(second_order_check(&m, &gs, &one, &u).unwrap());
        // a second sample
        let basis = m.invariant_quadratic_basis();
        let v = LaurentH::from_part(m.ctx(), 2, basis[1].mul(&basis[2]));
        assert!(second_order_check(&m, &gs, &u, &v).unwrap());
    }

    #[test]
    fn c2_red_equals_hatted_c2() {
        let m = model();
        let basis = m.invariant_quadratic_basis();
        let u = ReducedFunction::classical(
            &m,
            LaurentH::from_part(m.ctx(), 1, basis[0].clone()),
            2,
        )
        .unwrap();
        let v = ReducedFunction::classical(
            &m,
            LaurentH::from_part(m.ctx(), 1, basis[3].clone()),
            2,
        )
        .unwrap();
        let ops = koszul::extract_operators(&m, &u, &v, 2).unwrap();
        assert_eq!(ops.c_red, ops.c_hat_red);
    }

    #[test]
    fn pullback_hessian_table() {
        let m = model();
        let u = LaurentH::from_part(m.ctx(), 1, inv_quad(&m));
        assert!(pullback_hessian_table_check(&m, &u).unwrap());
        let basis = m.invariant_quadratic_basis();
        let v = LaurentH::from_part(m.ctx(), 2, basis[0].mul(&basis[1]));
        assert!(pullback_hessian_table_check(&m, &v).unwrap());
    }
}
