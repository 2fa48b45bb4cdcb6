//! Chart-level symbol calculus for symplectic connections.
//!
//! A `ChartModel` is an even-dimensional coordinate chart with the
//! standard constant symplectic matrix and a symplectic torsion-free
//! connection given by a totally symmetric lowered Christoffel tensor
//! with polynomial entries. Everything lives in one shared polynomial
//! space: `m` chart variables, `m` momentum variables (for symbols on
//! the cotangent bundle) and one central parameter `lambda = i hbar`.
//!
//! This module provides the symmetrized covariant derivative, the
//! curvature and Ricci tensors with an independent double-derivative
//! oracle, the Ricci-type curvature predicate, the pointwise
//! divergence identities of the Ricci-type hypothesis equations, and
//! the local Ricci operator.

pub mod diffop;
pub mod quantize;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::scalar::{self, Scalar};

pub use diffop::PolyDiffOp;

/// The chart: dimension, constant symplectic matrix, Christoffel data.
#[derive(Debug)]
pub struct ChartModel {
    m: usize,
    nvars: usize,
    omega: Vec<Vec<Scalar>>,
    lambda0: Vec<Vec<Scalar>>,
    /// Raised symbols `Gamma^k_{ij}`, symmetric in `(i, j)`.
    gamma: Vec<Vec<Vec<MultiPoly>>>,
}

impl ChartModel {
    /// Builds a chart of even dimension `m` with the standard
    /// symplectic matrix and the connection determined by the totally
    /// symmetric lowered Christoffel tensor `gamma_lower[k][i][j]`
    /// (entries: polynomials in the shared space; see
    /// [`ChartModel::x_var`] for the variable layout). Total symmetry
    /// is required; torsion-freeness and parallelism of the symplectic
    /// form are re-checked from the raised symbols.
    pub fn new(m: usize, gamma_lower: Vec<Vec<Vec<MultiPoly>>>) -> Result<ChartModel> {
        if m < 2 || m % 2 != 0 {
            return Err(Error::Config("chart dimension must be even and >= 2".into()));
        }
        let nvars = 2 * m + 1;
        let half = m / 2;
        let mut omega = vec![vec![scalar::zero(); m]; m];
        let mut lambda0 = vec![vec![scalar::zero(); m]; m];
        for i in 0..half {
            omega[i][half + i] = scalar::one();
            omega[half + i][i] = scalar::int(-1);
            lambda0[i][half + i] = scalar::int(-1);
            lambda0[half + i][i] = scalar::one();
        }
        // total symmetry of the lowered tensor
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    let t = &gamma_lower[k][i][j];
                    if t.nvars() != nvars {
                        return Err(Error::VariableMismatch(t.nvars(), nvars));
                    }
                    if *t != gamma_lower[k][j][i] || *t != gamma_lower[i][k][j] {
                        return Err(Error::Config(
                            "lowered Christoffel tensor must be totally symmetric".into(),
                        ));
                    }
                }
            }
        }
        // raise: Gamma^k_{ij} = Lambda0^{kl} Gamma_{lij}
        let mut gamma = vec![vec![vec![MultiPoly::zero(nvars); m]; m]; m];
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    let mut acc = MultiPoly::zero(nvars);
                    for l in 0..m {
                        if !lambda0[k][l].is_zero() {
                            acc.add_assign(&gamma_lower[l][i][j].scale(&lambda0[k][l]));
                        }
                    }
                    gamma[k][i][j] = acc;
                }
            }
        }
        let model = ChartModel {
            m,
            nvars,
            omega,
            lambda0,
            gamma,
        };
        // torsion-freeness is symmetry of the raised symbols
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    if model.gamma[k][i][j] != model.gamma[k][j][i] {
                        return Err(Error::ModelInconsistency {
                            check: "torsion_free".into(),
                            detail: format!("Gamma^{}_{{{},{}}} asymmetric", k, i, j),
                        });
                    }
                }
            }
        }
        // nabla omega = 0: d_a omega_{bc} - Gamma^d_{ab} omega_{dc}
        //   - Gamma^d_{ac} omega_{bd} = 0
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let mut acc = MultiPoly::zero(nvars);
                    for d in 0..m {
                        if !model.omega[d][c].is_zero() {
                            acc.add_assign(&model.gamma[d][a][b].scale(&-model.omega[d][c].clone()));
                        }
                        if !model.omega[b][d].is_zero() {
                            acc.add_assign(&model.gamma[d][a][c].scale(&-model.omega[b][d].clone()));
                        }
                    }
                    if !acc.is_zero() {
                        return Err(Error::ModelInconsistency {
                            check: "symplectic_parallel".into(),
                            detail: format!("(nabla omega)_{{{},{},{}}} = {}", a, b, c, acc),
                        });
                    }
                }
            }
        }
        Ok(model)
    }

    /// A flat chart (vanishing Christoffel symbols).
    pub fn flat(m: usize) -> ChartModel {
        let nvars = 2 * m + 1;
        let zero = MultiPoly::zero(nvars);
        Self::new(m, vec![vec![vec![zero; m]; m]; m]).expect("flat chart is consistent")
    }

    // ---- Variable layout ----

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Chart coordinate `x^i`.
    pub fn x_var(&self, i: usize) -> usize {
        i
    }

    /// Momentum coordinate `p_i` of the cotangent fiber.
    pub fn p_var(&self, i: usize) -> usize {
        self.m + i
    }

    /// The central parameter.
    pub fn lambda_var(&self) -> usize {
        2 * self.m
    }

    pub fn omega(&self) -> &[Vec<Scalar>] {
        &self.omega
    }

    pub fn lambda0(&self) -> &[Vec<Scalar>] {
        &self.lambda0
    }

    pub fn gamma(&self) -> &[Vec<Vec<MultiPoly>>] {
        &self.gamma
    }

    /// `d_i` restricted to chart variables.
    pub fn x_partial(&self, f: &MultiPoly, i: usize) -> MultiPoly {
        f.partial(self.x_var(i))
    }
}

// ---- Symmetric covariant tensors and SymD ----

/// A symmetric covariant tensor stored by sorted multi-index.
pub type SymCov = BTreeMap<Vec<usize>, MultiPoly>;

/// Covariant derivative of a symmetric covariant tensor:
/// `(nabla_c gamma)_J = d_c gamma_J - sum_s Gamma^d_{c J[s]} gamma_{J[s->d]}`.
fn nabla_cov(model: &ChartModel, t: &SymCov, c: usize) -> BTreeMap<Vec<usize>, MultiPoly> {
    let mut out: BTreeMap<Vec<usize>, MultiPoly> = BTreeMap::new();
    for (idx, val) in t {
        let mut d = model.x_partial(val, c);
        for s in 0..idx.len() {
            for dvar in 0..model.m {
                let g = &model.gamma[dvar][c][idx[s]];
                if g.is_zero() {
                    continue;
                }
                let mut jdx = idx.clone();
                jdx[s] = dvar;
                jdx.sort_unstable();
                if let Some(v) = t.get(&jdx) {
                    d.add_assign(&g.mul(v).scale(&scalar::int(-1)));
                }
            }
        }
        if !d.is_zero() {
            out.insert(idx.clone(), d);
        }
    }
    out
}

/// One application of the symmetrized covariant derivative:
/// `(SymD gamma)(X_0, ..., X_k) = sum_l (nabla_{X_l} gamma)(rest)`.
pub fn sym_d(model: &ChartModel, t: &SymCov, grade: usize) -> SymCov {
    // cache nabla_c t for each c
    let nablas: Vec<BTreeMap<Vec<usize>, MultiPoly>> =
        (0..model.m).map(|c| nabla_cov(model, t, c)).collect();
    let mut out: SymCov = BTreeMap::new();
    // iterate over sorted multi-indices of length grade+1
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..=grade {
        let mut next = Vec::new();
        for idx in &stack {
            let start = idx.last().copied().unwrap_or(0);
            for i in start..model.m {
                let mut j = idx.clone();
                j.push(i);
                next.push(j);
            }
        }
        stack = next;
    }
    for idx in stack {
        let mut acc = MultiPoly::zero(model.nvars);
        for l in 0..idx.len() {
            let c = idx[l];
            let mut rest = idx.clone();
            rest.remove(l);
            if let Some(v) = nablas[c].get(&rest) {
                acc.add_assign(v);
            }
        }
        if !acc.is_zero() {
            out.insert(idx, acc);
        }
    }
    out
}

/// Iterated `SymD` starting from a function (grade 0).
pub fn sym_d_powers(model: &ChartModel, u: &MultiPoly, upto: usize) -> Vec<SymCov> {
    let mut out = Vec::with_capacity(upto + 1);
    let mut cur: SymCov = BTreeMap::new();
    if !u.is_zero() {
        cur.insert(Vec::new(), u.clone());
    }
    out.push(cur.clone());
    for k in 0..upto {
        cur = sym_d(model, &cur, k);
        out.push(cur.clone());
    }
    out
}

// ---- Curvature ----

/// Curvature, Ricci tensor and Ricci endomorphism derived from the
/// Christoffel symbols.
pub struct Curvature {
    /// `R[d][c][a][b]` is the coefficient of `d_d` in `R(d_a, d_b) d_c`.
    pub r: Vec<Vec<Vec<Vec<MultiPoly>>>>,
    /// `Ric_{bc} = R^a_{c;ab}` (symmetric for symplectic connections).
    pub ric: Vec<Vec<MultiPoly>>,
    /// `rho^a_b = Lambda0^{ac} Ric_{cb}`.
    pub rho: Vec<Vec<MultiPoly>>,
}

/// The coordinate curvature formula
/// `R^d_{c;ab} = d_a Gamma^d_{bc} - d_b Gamma^d_{ac}
///   + Gamma^d_{ae} Gamma^e_{bc} - Gamma^d_{be} Gamma^e_{ac}`.
pub fn curvature_and_ricci(model: &ChartModel) -> Curvature {
    let m = model.m;
    let nv = model.nvars;
    let mut r = vec![vec![vec![vec![MultiPoly::zero(nv); m]; m]; m]; m];
    for d in 0..m {
        for c in 0..m {
            for a in 0..m {
                for b in 0..m {
                    if a == b {
                        continue;
                    }
                    let mut acc = model.x_partial(&model.gamma[d][b][c], a);
                    acc.add_assign(&model.x_partial(&model.gamma[d][a][c], b).scale(&scalar::int(-1)));
                    for e in 0..m {
                        acc.add_assign(&model.gamma[d][a][e].mul(&model.gamma[e][b][c]));
                        acc.add_assign(
                            &model.gamma[d][b][e]
                                .mul(&model.gamma[e][a][c])
                                .scale(&scalar::int(-1)),
                        );
                    }
                    r[d][c][a][b] = acc;
                }
            }
        }
    }
    let mut ric = vec![vec![MultiPoly::zero(nv); m]; m];
    for b in 0..m {
        for c in 0..m {
            let mut acc = MultiPoly::zero(nv);
            for a in 0..m {
                acc.add_assign(&r[a][c][a][b]);
            }
            ric[b][c] = acc;
        }
    }
    let mut rho = vec![vec![MultiPoly::zero(nv); m]; m];
    for a in 0..m {
        for b in 0..m {
            let mut acc = MultiPoly::zero(nv);
            for c in 0..m {
                if !model.lambda0[a][c].is_zero() {
                    acc.add_assign(&ric[c][b].scale(&model.lambda0[a][c]));
                }
            }
            rho[a][b] = acc;
        }
    }
    Curvature { r, ric, rho }
}

/// Brute-force curvature oracle: `R(d_a, d_b) d_c` computed by two
/// nested covariant derivatives of coordinate fields.
pub fn curvature_oracle(model: &ChartModel, a: usize, b: usize, c: usize) -> Vec<MultiPoly> {
    let m = model.m;
    let nv = model.nvars;
    // nabla_i of a vector field with components v
    let nabla = |i: usize, v: &[MultiPoly]| -> Vec<MultiPoly> {
        (0..m)
            .map(|d| {
                let mut acc = model.x_partial(&v[d], i);
                for e in 0..m {
                    if !v[e].is_zero() {
                        acc.add_assign(&model.gamma[d][i][e].mul(&v[e]));
                    }
                }
                acc
            })
            .collect()
    };
    let mut ec = vec![MultiPoly::zero(nv); m];
    ec[c] = MultiPoly::one(nv);
    let nb = nabla(b, &ec);
    let na = nabla(a, &ec);
    let anb = nabla(a, &nb);
    let bna = nabla(b, &na);
    (0..m).map(|d| &anb[d] - &bna[d]).collect()
}

// ---- Ricci-type predicate and divergence identities ----

/// True iff the curvature equals the canonical expression in its Ricci
/// tensor:
/// `R(X, Y) = -(1/(2n+1)) ( -2 omega(X,Y) rho - rho(Y) (x) X^b
///   + rho(X) (x) Y^b - X (x) (rho Y)^b + Y (x) (rho X)^b )`
/// with `2n = m`. Requires `m >= 4`.
pub fn ricci_type_predicate(
    model: &ChartModel,
    r: &[Vec<Vec<Vec<MultiPoly>>>],
    ric: &[Vec<MultiPoly>],
) -> Result<bool> {
    if model.m < 4 {
        return Err(Error::DimensionTooSmall(model.m));
    }
    let rhs = ricci_type_curvature(model, ric);
    for d in 0..model.m {
        for c in 0..model.m {
            for a in 0..model.m {
                for b in 0..model.m {
                    if r[d][c][a][b] != rhs[d][c][a][b] {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// The canonical Ricci-type curvature built from a (symmetric) Ricci
/// tensor; used both by the predicate and to manufacture examples.
pub fn ricci_type_curvature(
    model: &ChartModel,
    ric: &[Vec<MultiPoly>],
) -> Vec<Vec<Vec<Vec<MultiPoly>>>> {
    let m = model.m;
    let nv = model.nvars;
    // rho from the given Ric
    let mut rho = vec![vec![MultiPoly::zero(nv); m]; m];
    for a in 0..m {
        for b in 0..m {
            let mut acc = MultiPoly::zero(nv);
            for c in 0..m {
                if !model.lambda0[a][c].is_zero() {
                    acc.add_assign(&ric[c][b].scale(&model.lambda0[a][c]));
                }
            }
            rho[a][b] = acc;
        }
    }
    let pref = scalar::ratio(-1, m as i64 + 1);
    let mut out = vec![vec![vec![vec![MultiPoly::zero(nv); m]; m]; m]; m];
    for d in 0..m {
        for c in 0..m {
            for a in 0..m {
                for b in 0..m {
                    let mut acc = MultiPoly::zero(nv);
                    // -2 omega(X,Y) rho(Z)
                    if !model.omega[a][b].is_zero() {
                        acc.add_assign(
                            &rho[d][c].scale(&(scalar::int(-2) * model.omega[a][b].clone())),
                        );
                    }
                    // - rho(Y) X^b(Z): X^b(Z) = omega_{ac}
                    if !model.omega[a][c].is_zero() {
                        acc.add_assign(&rho[d][b].scale(&-model.omega[a][c].clone()));
                    }
                    // + rho(X) Y^b(Z)
                    if !model.omega[b][c].is_zero() {
                        acc.add_assign(&rho[d][a].scale(&model.omega[b][c].clone()));
                    }
                    // - X (rho Y)^b(Z): (rho Y)^b(Z) = rho^e_b omega_{ec}
                    if d == a {
                        for e in 0..m {
                            if !model.omega[e][c].is_zero() {
                                acc.add_assign(&rho[e][b].scale(&-model.omega[e][c].clone()));
                            }
                        }
                    }
                    // + Y (rho X)^b(Z)
                    if d == b {
                        for e in 0..m {
                            if !model.omega[e][c].is_zero() {
                                acc.add_assign(&rho[e][a].scale(&model.omega[e][c].clone()));
                            }
                        }
                    }
                    out[d][c][a][b] = acc.scale(&pref);
                }
            }
        }
    }
    out
}

/// Pointwise verification of the covariant divergences dictated by the
/// hypothesis equations of a Ricci-type connection, on formal data
/// `(rho, U, f, K)` at a point:
/// contracting `nabla Ric# = (1/(2n+1)) X v U` gives `div Ric# = U`,
/// and tracing `nabla U = -(2n+1)/(2(n+1)) rho^2 + f` gives
/// `div U = -(2n+1)/(2(n+1)) K + 2(n+1) f`, given the trace relation
/// `tr(rho^2) + 4(n+1)/(2n+1) f = K`.
pub fn ricci_divergence_identities(
    n: usize,
    rho: &[Vec<Scalar>],
    u: &[Scalar],
    f: &Scalar,
    k: &Scalar,
) -> bool {
    let m = 2 * n;
    let ni = n as i64;
    // trace relation on the inputs
    let mut tr = scalar::zero();
    for a in 0..m {
        for b in 0..m {
            tr = tr + rho[a][b].clone() * rho[b][a].clone();
        }
    }
    if tr.clone() + scalar::ratio(4 * (ni + 1), 2 * ni + 1) * f.clone() != *k {
        return false;
    }
    // div Ric#: contract (1/(2n+1)) (delta^a_c U^b + U^a delta^b_c) over a = c
    for b in 0..m {
        let mut acc = scalar::zero();
        for a in 0..m {
            // c = a
            let mut t = scalar::zero();
            if a == a {
                t = t + u[b].clone();
            }
            if b == a {
                t = t + u[a].clone();
            }
            acc = acc + t * scalar::ratio(1, 2 * ni + 1);
        }
        if acc != u[b] {
            return false;
        }
    }
    // div U = tr(nabla U) = -(2n+1)/(2(n+1)) tr(rho^2) + 2n f
    let mut div_u = f.clone() * scalar::int(2 * ni);
    div_u = div_u - scalar::ratio(2 * ni + 1, 2 * (ni + 1)) * tr;
    let rhs = scalar::ratio(-(2 * ni + 1), 2 * (ni + 1)) * k.clone()
        + scalar::int(2 * (ni + 1)) * f.clone();
    div_u == rhs
}

/// The local Ricci operator
/// `DeltaRic u = Ric^{ij} (d_i d_j u - Gamma^k_{ij} d_k u)` with
/// `Ric^{ij} = Lambda0^{ik} Lambda0^{jl} Ric_{kl}`.
pub fn delta_ric_chart(model: &ChartModel, ric: &[Vec<MultiPoly>], u: &MultiPoly) -> MultiPoly {
    delta_ric_chart_op(model, ric).apply(u)
}

/// The same operator as a `PolyDiffOp`.
pub fn delta_ric_chart_op(model: &ChartModel, ric: &[Vec<MultiPoly>]) -> PolyDiffOp {
    let m = model.m;
    let raised = raise_ric(model, ric);
    let mut op = PolyDiffOp::zero(m, model.nvars);
    for i in 0..m {
        for j in 0..m {
            if raised[i][j].is_zero() {
                continue;
            }
            let mut alpha = vec![0u32; m];
            alpha[i] += 1;
            alpha[j] += 1;
            op.add_term(alpha, raised[i][j].clone());
            for kk in 0..m {
                let g = &model.gamma[kk][i][j];
                if g.is_zero() {
                    continue;
                }
                let mut beta = vec![0u32; m];
                beta[kk] = 1;
                op.add_term(beta, raised[i][j].mul(g).scale(&scalar::int(-1)));
            }
        }
    }
    op
}

/// `Ric^{ij} = Lambda0^{ik} Lambda0^{jl} Ric_{kl}`.
pub fn raise_ric(model: &ChartModel, ric: &[Vec<MultiPoly>]) -> Vec<Vec<MultiPoly>> {
    let m = model.m;
    let mut out = vec![vec![MultiPoly::zero(model.nvars); m]; m];
    for i in 0..m {
        for j in 0..m {
            let mut acc = MultiPoly::zero(model.nvars);
            for kk in 0..m {
                if model.lambda0[i][kk].is_zero() {
                    continue;
                }
                for l in 0..m {
                    if model.lambda0[j][l].is_zero() {
                        continue;
                    }
                    acc.add_assign(
                        &ric[kk][l].scale(&(model.lambda0[i][kk].clone() * model.lambda0[j][l].clone())),
                    );
                }
            }
            out[i][j] = acc;
        }
    }
    out
}
