//! The Weyl-Moyal star product on the cone.
//!
//! With the flat connection the symmetrized covariant derivatives are
//! plain partials, so the bidifferential operators are the over-cross
//! contractions
//!
//! `C_r(f, g) = Lambda^{i1 j1} ... Lambda^{ir jr} (d^r f)_{i...} (d^r g)_{j...}`
//!
//! and `f * g = sum_r (1/r!) (nu/2)^r C_r(f, g)` truncated at the series
//! order. The contraction exploits that the Poisson matrix has one
//! nonzero entry per row and that the partial tensors are symmetric, so
//! the sum runs over index multisets with multinomial weights.

use std::collections::HashMap;

use crate::error::Result;
use crate::laurent::{LaurentAcc, LaurentH};
use crate::model::FlatModel;
use crate::scalar::{self, Scalar};
use crate::series::NuSeries;

/// Memoized iterated partial derivatives of one function, keyed by the
/// sorted index multiset.
pub struct PartialCache<'a> {
    base: &'a LaurentH,
    memo: HashMap<Vec<usize>, LaurentH>,
}

impl<'a> PartialCache<'a> {
    pub fn new(base: &'a LaurentH) -> Self {
        PartialCache {
            base,
            memo: HashMap::new(),
        }
    }

    /// `d_I base` for a sorted multi-index `I`.
    fn get(&mut self, idx: &[usize]) -> LaurentH {
        if idx.is_empty() {
            return self.base.clone();
        }
        if let Some(v) = self.memo.get(idx) {
            return v.clone();
        }
        let tail = self.get(&idx[1..]);
        let v = tail.partial(idx[0]);
        self.memo.insert(idx.to_vec(), v.clone());
        v
    }
}

/// All sorted multisets of size `r` over `0..n`.
fn multisets(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, r: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, r, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, r, 0, &mut Vec::new(), &mut out);
    out
}

/// `r! / prod(multiplicities!)` for a sorted multiset.
fn multinomial(idx: &[usize]) -> Scalar {
    let mut coeff = scalar::factorial(idx.len());
    let mut run = 1usize;
    for w in 1..=idx.len() {
        if w < idx.len() && idx[w] == idx[w - 1] {
            run += 1;
        } else {
            coeff = coeff / scalar::factorial(run);
            run = 1;
        }
    }
    coeff
}

fn c_r_cached(
    m: &FlatModel,
    cf: &mut PartialCache<'_>,
    cg: &mut PartialCache<'_>,
    r: usize,
) -> LaurentH {
    let ctx = m.ctx();
    if r == 0 {
        return cf.get(&[]).mul(&cg.get(&[]));
    }
    let sparse = m.lambda_sparse();
    let mut acc = LaurentAcc::new(ctx);
    for idx in multisets(m.nvars(), r) {
        let df = cf.get(&idx);
        if df.is_zero() {
            continue;
        }
        // choose a nonzero Poisson entry per index slot; with the
        // standard matrix each row has exactly one partner
        let mut choices: Vec<(Vec<usize>, Scalar)> = vec![(Vec::new(), multinomial(&idx))];
        for &i in &idx {
            let mut next = Vec::new();
            for (partial_j, coeff) in &choices {
                for (j, s) in &sparse[i] {
                    let mut pj = partial_j.clone();
                    pj.push(*j);
                    next.push((pj, coeff.clone() * s.clone()));
                }
            }
            choices = next;
        }
        for (mut jdx, coeff) in choices {
            jdx.sort_unstable();
            let dg = cg.get(&jdx);
            if dg.is_zero() {
                continue;
            }
            acc.add_product_scaled(&df, &dg, &coeff);
        }
    }
    acc.finish()
}

/// The bidifferential operator `C_r(f, g)`; `C_0` is the product and
/// `C_1` the Poisson bracket.
pub fn c_r(m: &FlatModel, f: &LaurentH, g: &LaurentH, r: usize) -> LaurentH {
    let mut cf = PartialCache::new(f);
    let mut cg = PartialCache::new(g);
    c_r_cached(m, &mut cf, &mut cg, r)
}

/// The Weyl-Moyal product, exact modulo `nu^(order+1)`.
pub fn moyal(m: &FlatModel, f: &NuSeries, g: &NuSeries) -> Result<NuSeries> {
    if f.order() != g.order() {
        return Err(crate::error::Error::TruncationMismatch(f.order(), g.order()));
    }
    let n = f.order();
    let mut caches_f: Vec<PartialCache<'_>> = f.coeffs().iter().map(PartialCache::new).collect();
    let mut caches_g: Vec<PartialCache<'_>> = g.coeffs().iter().map(PartialCache::new).collect();
    let mut coeffs = vec![LaurentH::zero(m.ctx()); n + 1];
    for out in 0..=n {
        let mut acc = LaurentAcc::new(m.ctx());
        for r in 0..=out {
            // (1/r!) (1/2)^r C_r(f_s, g_t) with s + t = out - r
            let w = scalar::factorial(r).recip() * scalar::ratio(1, 2).pow(r as i32);
            for s in 0..=(out - r) {
                let t = out - r - s;
                if f.coeff(s).is_zero() || g.coeff(t).is_zero() {
                    continue;
                }
                let (cf, cg) = (&mut caches_f[s], &mut caches_g[t]);
                let term = c_r_cached(m, cf, cg, r);
                acc.add_scaled(&term, &w);
            }
        }
        coeffs[out] = acc.finish();
    }
    Ok(NuSeries::from_coeffs(coeffs))
}

/// Strong invariance: `(1/nu) ad(H) f = X_H f`, exactly and not merely
/// modulo the truncation. Beyond the series identity this asserts the
/// structural fact that `C_r(H, .)` vanishes for `r >= 3` (third
/// partials of the quadratic momentum vanish), which kills every order
/// the truncation cannot see.
pub fn ad_h_check(m: &FlatModel, f: &NuSeries) -> bool {
    let n = f.order();
    let h = NuSeries::from_constant(m.h(), n);
    let hf = moyal(m, &h, f).expect("orders match");
    let fh = moyal(m, f, &h).expect("orders match");
    let comm = hf.sub(&fh);
    let lhs = match comm.div_nu(1) {
        Ok(v) => v,
        Err(_) => return false,
    };
    let rhs = f.map(|c| m.xh_apply(c));
    if lhs != rhs {
        return false;
    }
    // exactness witness: the contraction against third partials of H
    for c in f.coeffs() {
        if !c_r(m, &m.h(), c, 3).is_zero() {
            return false;
        }
    }
    true
}

/// The homogeneity derivation `E = nu d/dnu + L_S`.
pub fn nu_euler(m: &FlatModel, f: &NuSeries) -> NuSeries {
    f.nu_times_dnu().add(&f.map(|c| m.s_apply(c)))
}

/// `E(f * g) = E(f) * g + f * E(g)` modulo the truncation.
pub fn nu_euler_check(m: &FlatModel, f: &NuSeries, g: &NuSeries) -> bool {
    let lhs = nu_euler(m, &moyal(m, f, g).expect("orders match"));
    let rhs = moyal(m, &nu_euler(m, f), g)
        .expect("orders match")
        .add(&moyal(m, f, &nu_euler(m, g)).expect("orders match"));
    lhs == rhs
}

/// `C_r(f, g) = (-1)^r C_r(g, f)`.
pub fn parity_check(m: &FlatModel, f: &LaurentH, g: &LaurentH, r: usize) -> bool {
    let fg = c_r(m, f, g, r);
    let gf = c_r(m, g, f, r);
    let sign = if r % 2 == 0 {
        scalar::one()
    } else {
        scalar::int(-1)
    };
    fg == gf.scale(&sign)
}
