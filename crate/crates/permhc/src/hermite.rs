//! Hermite interpolation: recover a polynomial of degree `< q*r` from its
//! residues modulo `(t - tau)^r` at every `tau` in the field.
//!
//! The reconstruction is an incremental polynomial CRT: residues are folded
//! in one point at a time, updating a running solution and running modulus.
//! A streaming single-coefficient extractor is also provided for the large
//! parameter ranges where materialising the full interpolant is wasteful.

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::poly::Poly;
use crate::series::TruncSeries;
use std::collections::BTreeMap;

/// Residue of `q` modulo `(t - tau)^r`; the independent-route helper used by
/// tests and by residue producers.
pub fn residue_at(ctx: &FieldCtx, q: &Poly, tau: &FieldElem, r: usize) -> Poly {
    let modulus = Poly::linear_power(ctx, tau, r);
    let (_, rem) = q.divrem(ctx, &modulus).expect("monic modulus");
    rem
}

/// Recovers the unique `Q` of degree `< q*r` with `Q = residues[tau] mod
/// (t - tau)^r` for every `tau`, given residues keyed by canonical element
/// index. Runs in `O((q r)^2)` field operations.
pub fn hermite_interpolate(
    ctx: &FieldCtx,
    r: usize,
    residues: &BTreeMap<u64, Poly>,
) -> Result<Poly> {
    let q = ctx.q();
    for idx in 0..q {
        let res = residues.get(&idx).ok_or(Error::MissingResidue(idx))?;
        if let Some(d) = res.degree() {
            if d >= r {
                return Err(Error::ResidueDegree { got: d, order: r });
            }
        }
    }
    // Running solution `sol` and modulus `m = prod (t - tau)^r` over the
    // processed points; each step adds m * delta with
    // delta = (residue - sol) / m  (mod (t - tau)^r), computed in the
    // shifted coordinate v = t - tau.
    let mut sol = Poly::zero();
    let mut m = Poly::constant(ctx, ctx.one());
    for idx in 0..q {
        let tau = ctx.elem_from_index(idx);
        let res = &residues[&idx];
        let diff = res.sub(ctx, &sol);
        let diff_sh = diff.shift_mod(ctx, &tau, r);
        let m_sh = m.shift_mod(ctx, &tau, r);
        let m_inv = series_invert(ctx, &m_sh)?;
        let delta_sh = diff_sh.mul(ctx, &m_inv)?;
        // Shift back: delta has degree < r, so the full shift is exact.
        let delta = delta_sh.as_poly(ctx).shift(ctx, &ctx.neg(&tau));
        sol = sol.add(ctx, &m.mul(ctx, &delta));
        m = m.mul(ctx, &Poly::linear_power(ctx, &tau, r));
    }
    debug_assert!(sol.degree().map_or(true, |d| (d as u64) < q * r as u64));
    Ok(sol)
}

/// Inverse of a truncated series with nonzero constant term.
fn series_invert(ctx: &FieldCtx, s: &TruncSeries) -> Result<TruncSeries> {
    let r = s.order();
    let c0_inv = ctx.inv(s.constant_term())?;
    let mut inv = TruncSeries::zero(ctx, r);
    inv.coeffs[0] = c0_inv.clone();
    // Newton-free direct recurrence: b_k = -c0^-1 * sum_{i=1..k} a_i b_{k-i}.
    for k in 1..r {
        let mut acc = ctx.zero();
        for i in 1..=k {
            let prod = ctx.mul(&s.coeffs[i], &inv.coeffs[k - i]);
            acc = ctx.add(&acc, &prod);
        }
        inv.coeffs[k] = ctx.neg(&ctx.mul(&c0_inv, &acc));
    }
    Ok(inv)
}

/// Binomial coefficient mod p by Lucas' theorem.
pub fn binomial_mod_p(mut n: u64, mut k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut out = 1u64;
    while n > 0 || k > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return 0;
        }
        out = out * binomial_small(nd, kd) % p;
        n /= p;
        k /= p;
    }
    out
}

fn binomial_small(n: u64, k: u64) -> u64 {
    // n, k < p where p fits u64; n is tiny in practice (a base-p digit).
    let k = k.min(n - k);
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num *= (n - i) as u128;
        den *= (i + 1) as u128;
    }
    (num / den) as u64
}

/// Streaming extractor for a single coefficient of the Hermite interpolant.
///
/// Feeding, for each `tau`, the shifted residue `W = Q(t + tau) mod t^r`
/// (exactly what an r-order evaluation produces) accumulates
/// `coeff_d(Q) = (-1)^r * sum_{tau, j} W_j * omega_{tau,j}` where
/// `omega_{tau,j} = coeff_d((t^q - t)^r / (t - tau)^(r-j))`. Cost per point is
/// `O(r (r + log q))` multiplications, independent of `q*r`.
pub struct TopCoeffExtractor {
    ctx: FieldCtx,
    r: usize,
    d: u64,
    acc: FieldElem,
    fed: u64,
}

impl TopCoeffExtractor {
    pub fn new(ctx: &FieldCtx, r: usize, d: u64) -> TopCoeffExtractor {
        TopCoeffExtractor {
            ctx: ctx.clone(),
            r,
            d,
            acc: ctx.zero(),
            fed: 0,
        }
    }

    /// `omega_{tau,j}`: coefficient of `t^d` in `(t^q - t)^r (t - tau)^(j-r)`,
    /// via the sparse expansion of `(t^q - t)^r` and the Laurent series of
    /// the negative power.
    fn omega(&self, tau: &FieldElem, j: usize) -> FieldElem {
        let ctx = &self.ctx;
        let q = ctx.q();
        let r = self.r as u64;
        let e = r - j as u64;
        let p = ctx.p();
        let mut acc = ctx.zero();
        for i in 0..=r {
            // Term C(r,i) (-1)^(r-i) t^(qi + r - i) of (t^q - t)^r.
            let exp = q * i + r - i;
            if exp < e + self.d {
                continue;
            }
            let s = exp - e - self.d;
            let c1 = binomial_mod_p(r, i, p);
            if c1 == 0 {
                continue;
            }
            let c2 = binomial_mod_p(e - 1 + s, s, p);
            if c2 == 0 {
                continue;
            }
            let mut term = ctx.mul(&ctx.from_u64(c1), &ctx.from_u64(c2));
            term = ctx.mul(&term, &ctx.pow(tau, s));
            if (r - i) % 2 == 1 {
                term = ctx.neg(&term);
            }
            acc = ctx.add(&acc, &term);
        }
        acc
    }

    /// Folds in one point's shifted residue `w = Q(t + tau) mod t^r`.
    pub fn feed(&mut self, tau: &FieldElem, w: &TruncSeries) {
        debug_assert_eq!(w.order(), self.r);
        let ctx = self.ctx.clone();
        for j in 0..self.r {
            if ctx.is_zero(&w.coeffs[j]) {
                continue;
            }
            let om = self.omega(tau, j);
            let prod = ctx.mul(&w.coeffs[j], &om);
            self.acc = ctx.add(&self.acc, &prod);
        }
        self.fed += 1;
    }

    pub fn finish(self) -> Result<FieldElem> {
        if self.fed != self.ctx.q() {
            return Err(Error::Internal(format!(
                "coefficient extractor fed {} points, field has {}",
                self.fed,
                self.ctx.q()
            )));
        }
        if self.r % 2 == 1 {
            Ok(self.ctx.neg(&self.acc))
        } else {
            Ok(self.acc)
        }
    }
}
