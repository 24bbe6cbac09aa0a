//! Recovering `P(a)` from r-order evaluations along a Kakeya curve.
//!
//! For a homogeneous degree-`k` polynomial `P` in `m` variables and the
//! degree-`u` curve `C_a` through the Kakeya set with leading coefficients
//! `a`, the composition `Q(t) = P(C_a(t))` has degree `k*u < q*r` and its
//! `t^(k*u)` coefficient is exactly `P(a)`. Each `tau` contributes
//! `Q(t + tau) mod t^r` — one r-order evaluation at the curve point
//! `C_a(tau)` — and Hermite interpolation stitches the `q` residues back
//! into `Q`.

use crate::error::{Error, Result};
use crate::evaluator::{EvaluatorFamily, OrderEvaluator};
use crate::field::FieldElem;
use crate::hermite::{hermite_interpolate, TopCoeffExtractor};
use crate::kakeya::KakeyaSet;
use crate::poly::Poly;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Anything that can hand out an r-order evaluator bound to a given point.
/// The production implementation is [`EvaluatorFamily`]; tests substitute
/// direct polynomial evaluators.
pub trait EvaluatorAt: Sync {
    fn at_point(&self, point: &[FieldElem]) -> Result<Arc<dyn OrderEvaluator>>;
}

impl EvaluatorAt for EvaluatorFamily {
    fn at_point(&self, point: &[FieldElem]) -> Result<Arc<dyn OrderEvaluator>> {
        EvaluatorFamily::at_point(self, point)
    }
}

#[derive(Clone, Debug)]
pub struct RevealParams {
    /// Homogeneous degree of the target polynomial.
    pub k: usize,
    /// Cofactor with `q = 1 (mod b)`.
    pub b: u64,
    /// Curve degree `u = (q-1)/b - 1`.
    pub u: u64,
    /// Evaluation order `r = ceil(k/b)`.
    pub r: usize,
}

impl RevealParams {
    pub fn new(q: u64, k: usize, b: u64) -> Result<RevealParams> {
        if b < 1 || (q - 1) % b != 0 {
            return Err(Error::BadCofactor { b, qm1: q - 1 });
        }
        let u = (q - 1) / b - 1;
        if u < 1 {
            return Err(Error::DegenerateCurve { q, b });
        }
        let r = (k as u64).div_ceil(b) as usize;
        let params = RevealParams { k, b, u, r };
        // ku = k((q-1)/b - 1) < qk/b <= qr always holds; keep it checked.
        if k as u64 * u >= q * r as u64 {
            return Err(Error::Internal(format!(
                "degree bound violated: k*u = {} >= q*r = {}",
                k as u64 * u,
                q * r as u64
            )));
        }
        Ok(params)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftMode {
    /// Taylor-shift the curve polynomials for small degrees, switch to the
    /// closed form once `u` makes that expensive.
    Auto,
    Taylor,
    ClosedForm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InterpMode {
    /// Full Hermite interpolation while `q*r` is modest, streaming
    /// top-coefficient extraction beyond.
    Auto,
    Full,
    TopCoeff,
}

#[derive(Clone, Debug)]
pub struct RevealOptions {
    pub shift: ShiftMode,
    pub interp: InterpMode,
    /// Check every curve point against the Kakeya set. Costs a predicate
    /// probe per point; enabled automatically for small fields.
    pub check_membership: bool,
}

impl Default for RevealOptions {
    fn default() -> Self {
        RevealOptions {
            shift: ShiftMode::Auto,
            interp: InterpMode::Auto,
            check_membership: false,
        }
    }
}

const TAYLOR_DEGREE_LIMIT: u64 = 64;
const FULL_INTERP_LIMIT: u64 = 4096;

#[derive(Clone, Copy, Debug, Default)]
pub struct RevealStats {
    /// r-order evaluation queries issued; exactly `q` per reveal call.
    pub queries: u64,
    /// Series multiplications reported by those queries.
    pub series_mults: u64,
}

/// Computes `P(a)`; `P` is embodied by the evaluator provider.
pub fn reveal(
    provider: &dyn EvaluatorAt,
    kakeya: &KakeyaSet,
    a: &[FieldElem],
    params: &RevealParams,
    opts: &RevealOptions,
) -> Result<(FieldElem, RevealStats)> {
    let (value, _, stats) = reveal_impl(provider, kakeya, a, params, opts, false)?;
    Ok((value, stats))
}

/// Like [`reveal`] but also returns the interpolated `Q = P(C_a(t))`
/// (available only under full interpolation).
pub fn reveal_with_interpolant(
    provider: &dyn EvaluatorAt,
    kakeya: &KakeyaSet,
    a: &[FieldElem],
    params: &RevealParams,
    opts: &RevealOptions,
) -> Result<(FieldElem, Poly, RevealStats)> {
    let (value, q, stats) = reveal_impl(provider, kakeya, a, params, opts, true)?;
    Ok((value, q.expect("interpolant requested"), stats))
}

fn reveal_impl(
    provider: &dyn EvaluatorAt,
    kakeya: &KakeyaSet,
    a: &[FieldElem],
    params: &RevealParams,
    opts: &RevealOptions,
    want_interpolant: bool,
) -> Result<(FieldElem, Option<Poly>, RevealStats)> {
    let ctx = kakeya.ctx().clone();
    let q = ctx.q();
    let r = params.r;
    let d = params.k as u64 * params.u;
    if a.len() != kakeya.params.m {
        return Err(Error::Dimension(format!(
            "target has {} coordinates, Kakeya set has {}",
            a.len(),
            kakeya.params.m
        )));
    }
    if kakeya.params.u != params.u {
        return Err(Error::Internal(format!(
            "Kakeya degree {} does not match reveal degree {}",
            kakeya.params.u, params.u
        )));
    }
    let curve = kakeya.curve_for_point(a)?;

    let use_taylor = match opts.shift {
        ShiftMode::Taylor => true,
        ShiftMode::ClosedForm => false,
        ShiftMode::Auto => params.u <= TAYLOR_DEGREE_LIMIT,
    };
    let use_full = want_interpolant
        || match opts.interp {
            InterpMode::Full => true,
            InterpMode::TopCoeff => false,
            InterpMode::Auto => q * r as u64 <= FULL_INTERP_LIMIT,
        };

    let mut stats = RevealStats::default();
    let mut residues: BTreeMap<u64, Poly> = BTreeMap::new();
    let mut extractor = TopCoeffExtractor::new(&ctx, r, d);
    for tau_idx in 0..q {
        let tau = ctx.elem_from_index(tau_idx);
        let shifted = if use_taylor {
            curve.shift_mod(&ctx, &tau, r)
        } else {
            curve.shift_mod_fast(&ctx, &tau, r)
        };
        let point: Vec<FieldElem> = shifted.iter().map(|s| s.constant_term().clone()).collect();
        if opts.check_membership && !kakeya.contains(&point) {
            return Err(Error::Internal(format!(
                "curve point at tau index {tau_idx} escapes the Kakeya set"
            )));
        }
        let evaluator = provider.at_point(&point)?;
        let (w, mults) = evaluator.query(&shifted)?;
        stats.queries += 1;
        stats.series_mults += mults;
        if use_full {
            // w = Q(t + tau) mod t^r; shifting back yields Q mod (t - tau)^r.
            let residue = w.shift(&ctx, &ctx.neg(&tau)).as_poly(&ctx);
            residues.insert(tau_idx, residue);
        } else {
            extractor.feed(&tau, &w);
        }
    }

    if use_full {
        let interpolant = hermite_interpolate(&ctx, r, &residues)?;
        if let Some(deg) = interpolant.degree() {
            if deg as u64 > d {
                return Err(Error::Internal(format!(
                    "interpolant degree {deg} exceeds k*u = {d}"
                )));
            }
        }
        let value = interpolant.coeff(&ctx, d as usize);
        Ok((value, Some(interpolant), stats))
    } else {
        let value = extractor.finish()?;
        Ok((value, None, stats))
    }
}
