//! Frame tensors and the structure equations of the cone model.
//!
//! Everything here is an exact symbolic identity between tensors with
//! Laurent-in-H entries: the horizontal projector and its properties,
//! the reduced bivector and its Schouten bracket, the Hessian blocks of
//! the momentum, the connection table of the flat covariant derivative
//! on projected frames, and the bracket relations. Each check returns a
//! plain boolean (or a decomposition) computed with no tolerances.

use crate::error::{Error, Result};
use crate::laurent::LaurentH;
use crate::model::FlatModel;
use crate::scalar::{self, Scalar};

/// Symmetry contract for rank-2 tensors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    None,
    Symmetric,
    Antisymmetric,
}

/// A tensor over the cone frame with Laurent-in-H components.
///
/// Components are stored row-major with upper indices first. The
/// symmetry flag is verified at construction for rank-2 tensors.
#[derive(Clone, Debug)]
pub struct FrameTensor {
    up: usize,
    down: usize,
    dims: usize,
    comps: Vec<LaurentH>,
    sym: Symmetry,
}

impl FrameTensor {
    pub fn vector(comps: Vec<LaurentH>) -> Self {
        let dims = comps.len();
        FrameTensor {
            up: 1,
            down: 0,
            dims,
            comps,
            sym: Symmetry::None,
        }
    }

    pub fn covector(comps: Vec<LaurentH>) -> Self {
        let dims = comps.len();
        FrameTensor {
            up: 0,
            down: 1,
            dims,
            comps,
            sym: Symmetry::None,
        }
    }

    fn rank2(matrix: Vec<Vec<LaurentH>>, up: usize, down: usize, sym: Symmetry) -> Self {
        let dims = matrix.len();
        if sym != Symmetry::None {
            for a in 0..dims {
                for b in 0..dims {
                    let rhs = match sym {
                        Symmetry::Symmetric => matrix[b][a].clone(),
                        Symmetry::Antisymmetric => matrix[b][a].neg(),
                        Symmetry::None => unreachable!(),
                    };
                    assert_eq!(matrix[a][b], rhs, "symmetry flag violated at ({a},{b})");
                }
            }
        }
        FrameTensor {
            up,
            down,
            dims,
            comps: matrix.into_iter().flatten().collect(),
            sym,
        }
    }

    /// Antisymmetric (2,0) tensor.
    pub fn bivector(matrix: Vec<Vec<LaurentH>>) -> Self {
        Self::rank2(matrix, 2, 0, Symmetry::Antisymmetric)
    }

    /// Symmetric (0,2) tensor.
    pub fn symmetric_form(matrix: Vec<Vec<LaurentH>>) -> Self {
        Self::rank2(matrix, 0, 2, Symmetry::Symmetric)
    }

    /// (1,1) tensor, no symmetry contract.
    pub fn endomorphism(matrix: Vec<Vec<LaurentH>>) -> Self {
        Self::rank2(matrix, 1, 1, Symmetry::None)
    }

    pub fn valence(&self) -> (usize, usize) {
        (self.up, self.down)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn symmetry(&self) -> Symmetry {
        self.sym
    }

    pub fn as_vector(&self) -> &[LaurentH] {
        assert_eq!(self.up + self.down, 1);
        &self.comps
    }

    pub fn entry2(&self, a: usize, b: usize) -> &LaurentH {
        assert_eq!(self.up + self.down, 2);
        &self.comps[a * self.dims + b]
    }

    pub fn matrix(&self) -> Vec<Vec<LaurentH>> {
        assert_eq!(self.up + self.down, 2);
        (0..self.dims)
            .map(|a| (0..self.dims).map(|b| self.entry2(a, b).clone()).collect())
            .collect()
    }
}

// ---- Basic operations on component vectors ----

/// Flat covariant derivative of a vector field along another:
/// `(nabla_u w)^b = u^a d_a w^b`.
pub fn flat_nabla(u: &[LaurentH], w: &[LaurentH]) -> Vec<LaurentH> {
    let n = u.len();
    let ctx = u[0].ctx().clone();
    (0..n)
        .map(|b| {
            let mut acc = LaurentH::zero(&ctx);
            for a in 0..n {
                if u[a].is_zero() {
                    continue;
                }
                let d = w[b].partial(a);
                if !d.is_zero() {
                    acc = acc.add(&u[a].mul(&d));
                }
            }
            acc
        })
        .collect()
}

/// Lie bracket of vector fields with Laurent components.
pub fn lie_bracket(u: &[LaurentH], w: &[LaurentH]) -> Vec<LaurentH> {
    let uw = flat_nabla(u, w);
    let wu = flat_nabla(w, u);
    uw.iter().zip(&wu).map(|(a, b)| a.sub(b)).collect()
}

fn scale_vec(v: &[LaurentH], s: &Scalar) -> Vec<LaurentH> {
    v.iter().map(|c| c.scale(s)).collect()
}

fn sub_vec(u: &[LaurentH], v: &[LaurentH]) -> Vec<LaurentH> {
    u.iter().zip(v).map(|(a, b)| a.sub(b)).collect()
}

fn vec_is_zero(v: &[LaurentH]) -> bool {
    v.iter().all(|c| c.is_zero())
}

// ---- Projector and reduced bivector ----

/// `Pi v = v - ds(v) S + alpha(v) X_H`; output is annihilated by both
/// `ds` and `alpha`.
pub fn horizontal_project(m: &FlatModel, v: &[LaurentH]) -> Vec<LaurentH> {
    let ds_v = m.ds_of(v);
    let al_v = m.alpha_of(v);
    let s = m.s_vector();
    let xh = m.xh_vector();
    (0..m.nvars())
        .map(|b| v[b].sub(&ds_v.mul(&s[b])).add(&al_v.mul(&xh[b])))
        .collect()
}

/// The projector as a matrix `Pi^b_c` (row `b`, column `c`), so the
/// `c`-th column is the projected coordinate frame field `Pi d_c`.
pub fn projector(m: &FlatModel) -> Vec<Vec<LaurentH>> {
    let n = m.nvars();
    let ds = m.ds_form();
    let alpha = m.alpha_form();
    let s = m.s_vector();
    let xh = m.xh_vector();
    (0..n)
        .map(|b| {
            (0..n)
                .map(|c| {
                    let mut e = if b == c {
                        LaurentH::one(m.ctx())
                    } else {
                        LaurentH::zero(m.ctx())
                    };
                    e = e.sub(&s[b].mul(&ds[c]));
                    e = e.add(&xh[b].mul(&alpha[c]));
                    e
                })
                .collect()
        })
        .collect()
}

/// Column `c` of the projector: the projected frame field `Pi d_c`.
pub fn projected_frame(m: &FlatModel) -> Vec<Vec<LaurentH>> {
    let p = projector(m);
    let n = m.nvars();
    (0..n)
        .map(|c| (0..n).map(|b| p[b][c].clone()).collect())
        .collect()
}

/// The reduced bivector `B = H Lambda - S ^ X_H`; antisymmetric with
/// quadratic polynomial entries, annihilating both `ds` and `alpha`.
pub fn reduced_bivector(m: &FlatModel) -> FrameTensor {
    let n = m.nvars();
    let s = m.s_vector();
    let xh = m.xh_vector();
    let h = m.h();
    let matrix: Vec<Vec<LaurentH>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let mut e = h.scale(&m.lambda()[a][b]);
                    e = e.sub(&s[a].mul(&xh[b]));
                    e = e.add(&s[b].mul(&xh[a]));
                    e
                })
                .collect()
        })
        .collect();
    FrameTensor::bivector(matrix)
}

/// The lifted base symplectic form evaluated on two vectors:
/// `omega(u, v) = (mu(u, v) - dH(u) alpha(v) + alpha(u) dH(v)) / H`.
pub fn omega_lift(m: &FlatModel, u: &[LaurentH], v: &[LaurentH]) -> LaurentH {
    let mut num = m.mu_of(u, v);
    let dh_u = m.ds_of(u).shift_hpow(1);
    let dh_v = m.ds_of(v).shift_hpow(1);
    num = num.sub(&dh_u.mul(&m.alpha_of(v)));
    num = num.add(&m.alpha_of(u).mul(&dh_v));
    num.shift_hpow(-1)
}

/// Contracts a bivector against a covector in the first slot:
/// `raise(gamma)^b = B^{ab} gamma_a`.
fn bivector_raise(b: &FrameTensor, gamma: &[LaurentH]) -> Vec<LaurentH> {
    let n = b.dims();
    let ctx = gamma[0].ctx().clone();
    (0..n)
        .map(|j| {
            let mut acc = LaurentH::zero(&ctx);
            for a in 0..n {
                if gamma[a].is_zero() {
                    continue;
                }
                acc = acc.add(&b.entry2(a, j).mul(&gamma[a]));
            }
            acc
        })
        .collect()
}

// ---- Schouten bracket ----

/// Coordinate Schouten bracket of two bivectors, returned as the map
/// `(a,b,c) -> [P,Q]^{abc}` over strictly increasing triples.
pub fn schouten_bracket(
    p: &FrameTensor,
    q: &FrameTensor,
) -> Vec<((usize, usize, usize), LaurentH)> {
    let n = p.dims();
    let ctx = p.entry2(0, 0).ctx().clone();
    let mut out = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                let mut acc = LaurentH::zero(&ctx);
                // cyclic sum of P^{xd} d_d Q^{yz} + Q^{xd} d_d P^{yz}
                for &(x, y, z) in &[(a, b, c), (b, c, a), (c, a, b)] {
                    for d in 0..n {
                        let dq = q.entry2(y, z).partial(d);
                        if !dq.is_zero() {
                            acc = acc.add(&p.entry2(x, d).mul(&dq));
                        }
                        let dp = p.entry2(y, z).partial(d);
                        if !dp.is_zero() {
                            acc = acc.add(&q.entry2(x, d).mul(&dp));
                        }
                    }
                }
                out.push(((a, b, c), acc));
            }
        }
    }
    out
}

/// `(B ^ X)^{abc} = B^{ab} X^c + B^{bc} X^a + B^{ca} X^b` over
/// strictly increasing triples.
fn bivector_wedge_vector(
    b: &FrameTensor,
    x: &[LaurentH],
) -> Vec<((usize, usize, usize), LaurentH)> {
    let n = b.dims();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let mut acc = b.entry2(i, j).mul(&x[k]);
                acc = acc.add(&b.entry2(j, k).mul(&x[i]));
                acc = acc.add(&b.entry2(k, i).mul(&x[j]));
                out.push(((i, j, k), acc));
            }
        }
    }
    out
}

/// True iff `[B, B] = -2 B ^ X_H` exactly.
pub fn schouten_check(m: &FlatModel) -> bool {
    let b = reduced_bivector(m);
    let xh = m.xh_vector();
    let lhs = schouten_bracket(&b, &b);
    let rhs = bivector_wedge_vector(&b, &xh);
    lhs.iter()
        .zip(&rhs)
        .all(|((ia, va), (ib, vb))| ia == ib && *va == vb.scale(&scalar::int(-2)))
}

// ---- Hessian decomposition of H ----

/// The data read off the second covariant derivative of the momentum:
/// the lifted symmetric tensor `t`, the lifted vector `V` and the
/// function `phi`, together with exact verification of the vanishing
/// blocks.
#[derive(Clone, Debug)]
pub struct HessianData {
    pub t_lift: FrameTensor,
    pub v_lift: FrameTensor,
    pub phi: LaurentH,
}

/// Decomposes the flat Hessian of `H` (which is just `G`) against the
/// splitting into horizontal frame, `X_H` and `S`.
///
/// Extraction rules: `G(hor, hor) = -pr*t . H`, `G(hor, X_H) =
/// omega(., V) . H`, `G(X_H, X_H) = -pr*phi . H`, and the blocks
/// `G(hor, S)`, `G(X_H, S)` vanish while `G(S, S) = H/2`; failure of
/// any of these identities is a model inconsistency.
pub fn hessian_decompose(m: &FlatModel) -> Result<HessianData> {
    let n = m.nvars();
    let frame = projected_frame(m);
    let s = m.s_vector();
    let xh = m.xh_vector();
    let h = m.h();

    let fail = |check: &str, detail: String| -> Error {
        Error::ModelInconsistency {
            check: check.to_string(),
            detail,
        }
    };

    // (nabla_S dH)(S) = H/2
    let gss = m.g_of(&s, &s);
    if gss != h.scale(&scalar::ratio(1, 2)) {
        return Err(fail("hessian_s_s", format!("G(S,S) = {}", gss)));
    }
    // vanishing blocks
    for a in 0..n {
        let v = m.g_of(&frame[a], &s);
        if !v.is_zero() {
            return Err(fail("hessian_hor_s", format!("G(Pi d_{}, S) = {}", a, v)));
        }
    }
    let gxs = m.g_of(&xh, &s);
    if !gxs.is_zero() {
        return Err(fail("hessian_xh_s", format!("G(X_H, S) = {}", gxs)));
    }

    // t-lift: t(u, w) = -G(Pi u, Pi w)/H
    let t_matrix: Vec<Vec<LaurentH>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| m.g_of(&frame[a], &frame[b]).shift_hpow(-1).neg())
                .collect()
        })
        .collect();
    let t_lift = FrameTensor::symmetric_form(t_matrix);

    // V from the mixed block: gamma_a = G(Pi d_a, X_H)/H, V = -raise(gamma)
    let gamma: Vec<LaurentH> = (0..n)
        .map(|a| m.g_of(&frame[a], &xh).shift_hpow(-1))
        .collect();
    let b = reduced_bivector(m);
    let v_lift_comps = scale_vec(&bivector_raise(&b, &gamma), &scalar::int(-1));
    // verify the defining identity omega(Pi d_a, V) H = G(Pi d_a, X_H)
    for a in 0..n {
        let lhs = omega_lift(m, &frame[a], &v_lift_comps).shift_hpow(1);
        let rhs = gamma[a].shift_hpow(1);
        if lhs != rhs {
            return Err(fail(
                "hessian_mixed_block",
                format!("omega(Pi d_{}, V) H = {} but G(Pi d_{}, X_H) = {}", a, lhs, a, rhs),
            ));
        }
    }
    let v_lift = FrameTensor::vector(v_lift_comps);

    // phi from G(X_H, X_H) = -pr*phi . H
    let phi = m.g_of(&xh, &xh).shift_hpow(-1).neg();

    Ok(HessianData {
        t_lift,
        v_lift,
        phi,
    })
}

/// The endomorphism `tau` with `t(X, Y) = omega(X, tau Y)`, lifted:
/// `tau^b_c = B^{ba} t_{ac}`.
pub fn tau_lift(b: &FrameTensor, t: &FrameTensor) -> FrameTensor {
    let n = b.dims();
    let ctx = b.entry2(0, 0).ctx().clone();
    let matrix: Vec<Vec<LaurentH>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|c| {
                    let mut acc = LaurentH::zero(&ctx);
                    for a in 0..n {
                        let e = b.entry2(i, a).mul(t.entry2(a, c));
                        acc = acc.add(&e);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    FrameTensor::endomorphism(matrix)
}

fn apply_endo(e: &FrameTensor, v: &[LaurentH]) -> Vec<LaurentH> {
    let n = e.dims();
    let ctx = v[0].ctx().clone();
    (0..n)
        .map(|b| {
            let mut acc = LaurentH::zero(&ctx);
            for c in 0..n {
                if v[c].is_zero() {
                    continue;
                }
                acc = acc.add(&e.entry2(b, c).mul(&v[c]));
            }
            acc
        })
        .collect()
}

// ---- Connection table ----

/// Verifies the full covariant-derivative table of the flat connection
/// against the projected frame: the `S`- and `X_H`-components of
/// `nabla_{Pi d_a} Pi d_b` are `pr*t` and `1/2 pr*omega`, and the
/// remaining lines (`nabla_{hor} X_H`, `nabla_{hor} S = 1/2 hor`,
/// `nabla_{X_H} X_H = pr*phi S - V`, `nabla_{X_H} S = 1/2 X_H`,
/// `nabla_S S = 1/2 S`) hold exactly.
pub fn connection_split_check(m: &FlatModel) -> bool {
    let n = m.nvars();
    let frame = projected_frame(m);
    let s = m.s_vector();
    let xh = m.xh_vector();
    let half = scalar::ratio(1, 2);

    let hd = match hessian_decompose(m) {
        Ok(hd) => hd,
        Err(_) => return false,
    };
    let b = reduced_bivector(m);
    let tau = tau_lift(&b, &hd.t_lift);
    let v = hd.v_lift.as_vector();

    for a in 0..n {
        for c in 0..n {
            let w = flat_nabla(&frame[a], &frame[c]);
            // S-component = pr*t(., .)
            if m.ds_of(&w) != *hd.t_lift.entry2(a, c) {
                return false;
            }
            // X_H-component = 1/2 pr*omega(., .), i.e. alpha(w) = -1/2 omega
            let om = omega_lift(m, &frame[a], &frame[c]);
            if m.alpha_of(&w) != om.scale(&half).neg() {
                return false;
            }
        }
        // nabla_{hor} X_H = (tau hor) - pr*(omega(hor, V)) S
        let lhs = flat_nabla(&frame[a], &xh);
        let mut rhs = apply_endo(&tau, &frame[a]);
        let om_v = omega_lift(m, &frame[a], v);
        rhs = sub_vec(&rhs, &scale_vec(&s, &scalar::one())
            .iter()
            .map(|si| si.mul(&om_v))
            .collect::<Vec<_>>());
        if lhs != rhs {
            return false;
        }
        // nabla_{hor} S = 1/2 hor
        let lhs = flat_nabla(&frame[a], &s);
        if lhs != scale_vec(&frame[a], &half) {
            return false;
        }
    }

    // nabla_{X_H} X_H = pr*phi S - V
    let lhs = flat_nabla(&xh, &xh);
    let rhs = sub_vec(
        &s.iter().map(|si| si.mul(&hd.phi)).collect::<Vec<_>>(),
        v,
    );
    if lhs != rhs {
        return false;
    }
    // nabla_{X_H} S = 1/2 X_H and nabla_S S = 1/2 S
    if flat_nabla(&xh, &s) != scale_vec(&xh, &half) {
        return false;
    }
    if flat_nabla(&s, &s) != scale_vec(&s, &half) {
        return false;
    }
    true
}

// ---- Bracket relations ----

/// Verifies the Lie bracket relations at the level of `ds`- and
/// `alpha`-components: `[v_a, v_b]` is horizontal up to
/// `pr*omega(., .) X_H`, and `[S, v_a]`, `[X_H, v_a]` have no `S`- or
/// `X_H`-component (the frame fields are pointwise horizontal, not
/// genuine lifts, so only these components are asserted).
pub fn bracket_checks(m: &FlatModel) -> bool {
    let n = m.nvars();
    let frame = projected_frame(m);
    let s = m.s_vector();
    let xh = m.xh_vector();

    if !vec_is_zero(&lie_bracket(&s, &xh)) {
        return false;
    }
    for a in 0..n {
        for c in 0..n {
            let w = lie_bracket(&frame[a], &frame[c]);
            if !m.ds_of(&w).is_zero() {
                return false;
            }
            // X_H-coefficient of w is -alpha(w) and must equal pr*omega
            let om = omega_lift(m, &frame[a], &frame[c]);
            if m.alpha_of(&w).neg() != om {
                return false;
            }
        }
        let w = lie_bracket(&s, &frame[a]);
        if !m.ds_of(&w).is_zero() || !m.alpha_of(&w).is_zero() {
            return false;
        }
        let w = lie_bracket(&xh, &frame[a]);
        if !m.ds_of(&w).is_zero() || !m.alpha_of(&w).is_zero() {
            return false;
        }
    }
    true
}

/// Projector identities: `Pi^2 = Pi`, `tr Pi = 2n`, `ds . Pi = 0`,
/// `alpha . Pi = 0`.
pub fn projector_check(m: &FlatModel) -> bool {
    let n = m.nvars();
    let p = projector(m);
    let frame = projected_frame(m);
    // Pi^2 = Pi
    for b in 0..n {
        for c in 0..n {
            let mut acc = LaurentH::zero(m.ctx());
            for d in 0..n {
                acc = acc.add(&p[b][d].mul(&p[d][c]));
            }
            if acc != p[b][c] {
                return false;
            }
        }
    }
    // trace = 2n
    let mut tr = LaurentH::zero(m.ctx());
    for b in 0..n {
        tr = tr.add(&p[b][b]);
    }
    if tr != LaurentH::constant(m.ctx(), scalar::int(2 * m.n() as i64)) {
        return false;
    }
    // image annihilated by ds and alpha
    for c in 0..n {
        if !m.ds_of(&frame[c]).is_zero() || !m.alpha_of(&frame[c]).is_zero() {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MultiPoly;

    fn model() -> FlatModel {
        FlatModel::build(2, &[1; 6]).unwrap()
    }

    #[test]
    fn projector_kills_s_and_xh() {
        let m = model();
        assert!(vec_is_zero(&horizontal_project(&m, &m.s_vector())));
        assert!(vec_is_zero(&horizontal_project(&m, &m.xh_vector())));
        assert!(projector_check(&m));
    }

    #[test]
    fn reduced_bivector_kills_ds_and_alpha() {
        let m = model();
        let b = reduced_bivector(&m);
        let ds = m.ds_form();
        let alpha = m.alpha_form();
        for j in 0..m.nvars() {
            let mut acc_ds = LaurentH::zero(m.ctx());
            let mut acc_al = LaurentH::zero(m.ctx());
            for a in 0..m.nvars() {
                acc_ds = acc_ds.add(&b.entry2(a, j).mul(&ds[a]));
                acc_al = acc_al.add(&b.entry2(a, j).mul(&alpha[a]));
            }
            assert!(acc_ds.is_zero());
            assert!(acc_al.is_zero());
        }
    }

    #[test]
    fn reduced_bivector_quadratic_entries_n1() {
        let m = FlatModel::build(1, &[1; 4]).unwrap();
        let b = reduced_bivector(&m);
        for a in 0..4 {
            for c in 0..4 {
                let e = b.entry2(a, c);
                if a == c {
                    assert!(e.is_zero());
                } else {
                    assert!(!e.is_zero(), "entry ({a},{c}) vanished");
                    assert_eq!(e.max_hpow(), 0);
                    assert!(e.part(0).unwrap().is_homogeneous_of(2));
                }
            }
        }
    }

    #[test]
    fn schouten_identity_and_poisson_triviality() {
        let m = model();
        assert!(schouten_check(&m));

        // the constant Poisson bivector has vanishing self-bracket
        let n = m.nvars();
        let lam: Vec<Vec<LaurentH>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| LaurentH::constant(m.ctx(), m.lambda()[a][b].clone()))
                    .collect()
            })
            .collect();
        let lam = FrameTensor::bivector(lam);
        for (_, v) in schouten_bracket(&lam, &lam) {
            assert!(v.is_zero());
        }
    }

    #[test]
    fn schouten_fails_with_flipped_poisson_matrix() {
        // diagnostic: build the bivector with -Lambda but keep X_H
        let m = model();
        let n = m.nvars();
        let s = m.s_vector();
        let xh = m.xh_vector();
        let h = m.h();
        let matrix: Vec<Vec<LaurentH>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let mut e = h.scale(&(-m.lambda()[a][b].clone()));
                        e = e.sub(&s[a].mul(&xh[b]));
                        e = e.add(&s[b].mul(&xh[a]));
                        e
                    })
                    .collect()
            })
            .collect();
        let bad = FrameTensor::bivector(matrix);
        let lhs = schouten_bracket(&bad, &bad);
        let rhs = bivector_wedge_vector(&bad, &xh);
        let holds = lhs
            .iter()
            .zip(&rhs)
            .all(|((ia, va), (ib, vb))| ia == ib && *va == vb.scale(&scalar::int(-2)));
        assert!(!holds);
    }

    #[test]
    fn hessian_blocks_definite() {
        let m = model();
        let hd = hessian_decompose(&m).unwrap();
        assert!(vec_is_zero(hd.v_lift.as_vector()));
        assert_eq!(hd.phi, LaurentH::constant(m.ctx(), scalar::int(-2)));
        // (nabla_S dH)(S) = H/2 is re-checked inside; sanity here:
        assert_eq!(
            m.g_of(&m.s_vector(), &m.s_vector()),
            m.h().scale(&scalar::ratio(1, 2))
        );
    }

    #[test]
    fn connection_table_and_brackets() {
        for (n, sig) in [(1usize, vec![1i64; 4]), (2, vec![1; 6])] {
            let m = FlatModel::build(n, &sig).unwrap();
            assert!(connection_split_check(&m), "connection table n={}", n);
            assert!(bracket_checks(&m), "brackets n={}", n);
        }
        // matched indefinite signature
        let m = FlatModel::build(2, &[1, -1, 1, 1, -1, 1]).unwrap();
        assert!(schouten_check(&m));
        assert!(connection_split_check(&m));
        assert!(bracket_checks(&m));
        let hd = hessian_decompose(&m).unwrap();
        assert_eq!(hd.phi, LaurentH::constant(m.ctx(), scalar::int(-2)));
    }

    #[test]
    fn base_poisson_bracket_scales_with_h() {
        // {pr*u, pr*v} = H^{-1} (degree-0 invariant)
        let m = model();
        let nv = m.nvars();
        let w1 = {
            // q0 q1 + p0 p1: an invariant quadratic
            let q0 = MultiPoly::var(nv, m.q_index(0));
            let q1 = MultiPoly::var(nv, m.q_index(1));
            let p0 = MultiPoly::var(nv, m.p_index(0));
            let p1 = MultiPoly::var(nv, m.p_index(1));
            &(&q0 * &q1) + &(&p0 * &p1)
        };
        let w2 = {
            let q0 = MultiPoly::var(nv, m.q_index(0));
            let p1 = MultiPoly::var(nv, m.p_index(1));
            let q1 = MultiPoly::var(nv, m.q_index(1));
            let p0 = MultiPoly::var(nv, m.p_index(0));
            &(&q0 * &p1) - &(&q1 * &p0)
        };
        let u = LaurentH::from_part(m.ctx(), 1, w1);
        let v = LaurentH::from_part(m.ctx(), 1, w2);
        assert!(m.is_invariant(&u), "u invariant");
        assert!(m.is_invariant(&v), "v invariant");
        let br = m.poisson(&u, &v);
        let scaled = br.shift_hpow(1);
        assert!(scaled.is_degree_zero());
        assert!(m.is_invariant(&scaled));
    }
}
