//! Truncated power series `F_q[t]/t^r` and the ring handle over them.

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::poly::Poly;
use crate::ring::Ring;

/// An element of `F_q[t]/t^r`; `coeffs` has length exactly `r`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncSeries {
    pub(crate) coeffs: Vec<FieldElem>,
}

impl TruncSeries {
    pub fn zero(ctx: &FieldCtx, r: usize) -> TruncSeries {
        TruncSeries { coeffs: vec![ctx.zero(); r] }
    }

    pub fn constant(ctx: &FieldCtx, c: FieldElem, r: usize) -> TruncSeries {
        let mut s = TruncSeries::zero(ctx, r);
        s.coeffs[0] = c;
        s
    }

    pub fn from_poly(ctx: &FieldCtx, p: &Poly, r: usize) -> TruncSeries {
        let mut s = TruncSeries::zero(ctx, r);
        for i in 0..r.min(p.coeffs.len()) {
            s.coeffs[i] = p.coeffs[i].clone();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> &FieldElem {
        &self.coeffs[0]
    }

    pub fn as_poly(&self, ctx: &FieldCtx) -> Poly {
        Poly::from_coeffs(ctx, self.coeffs.clone())
    }

    pub fn is_zero(&self, ctx: &FieldCtx) -> bool {
        self.coeffs.iter().all(|c| ctx.is_zero(c))
    }

    fn check_order(&self, other: &TruncSeries) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch(self.order(), other.order()));
        }
        Ok(())
    }

    pub fn add(&self, ctx: &FieldCtx, other: &TruncSeries) -> Result<TruncSeries> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| ctx.add(a, b))
            .collect();
        Ok(TruncSeries { coeffs })
    }

    pub fn sub(&self, ctx: &FieldCtx, other: &TruncSeries) -> Result<TruncSeries> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| ctx.sub(a, b))
            .collect();
        Ok(TruncSeries { coeffs })
    }

    pub fn neg(&self, ctx: &FieldCtx) -> TruncSeries {
        TruncSeries { coeffs: self.coeffs.iter().map(|c| ctx.neg(c)).collect() }
    }

    /// Product mod `t^r`.
    pub fn mul(&self, ctx: &FieldCtx, other: &TruncSeries) -> Result<TruncSeries> {
        self.check_order(other)?;
        let r = self.order();
        let mut out = vec![ctx.zero(); r];
        for i in 0..r {
            if ctx.is_zero(&self.coeffs[i]) {
                continue;
            }
            for j in 0..r - i {
                if ctx.is_zero(&other.coeffs[j]) {
                    continue;
                }
                let prod = ctx.mul(&self.coeffs[i], &other.coeffs[j]);
                out[i + j] = ctx.add(&out[i + j], &prod);
            }
        }
        Ok(TruncSeries { coeffs: out })
    }

    pub fn scale(&self, ctx: &FieldCtx, s: &FieldElem) -> TruncSeries {
        TruncSeries { coeffs: self.coeffs.iter().map(|c| ctx.mul(c, s)).collect() }
    }

    /// Truncate (or zero-extend) to order `r`.
    pub fn truncate(&self, ctx: &FieldCtx, r: usize) -> TruncSeries {
        let mut out = TruncSeries::zero(ctx, r);
        for i in 0..r.min(self.order()) {
            out.coeffs[i] = self.coeffs[i].clone();
        }
        out
    }

    /// Taylor shift of the underlying degree `< r` polynomial; exact (no
    /// truncation happens because the degree stays below `r`), so shifting by
    /// `-tau` recovers the original.
    pub fn shift(&self, ctx: &FieldCtx, tau: &FieldElem) -> TruncSeries {
        let r = self.order();
        self.as_poly(ctx).shift_mod(ctx, tau, r)
    }
}

/// Ring handle for `F_q[t]/t^r`.
#[derive(Clone, Debug)]
pub struct SeriesRing {
    pub ctx: FieldCtx,
    pub r: usize,
}

impl SeriesRing {
    pub fn new(ctx: FieldCtx, r: usize) -> SeriesRing {
        assert!(r >= 1, "truncation order must be at least 1");
        SeriesRing { ctx, r }
    }
}

impl Ring for SeriesRing {
    type Elem = TruncSeries;

    fn zero(&self) -> TruncSeries {
        TruncSeries::zero(&self.ctx, self.r)
    }

    fn one(&self) -> TruncSeries {
        TruncSeries::constant(&self.ctx, self.ctx.one(), self.r)
    }

    fn add(&self, a: &TruncSeries, b: &TruncSeries) -> TruncSeries {
        a.add(&self.ctx, b).expect("series ring orders agree")
    }

    fn sub(&self, a: &TruncSeries, b: &TruncSeries) -> TruncSeries {
        a.sub(&self.ctx, b).expect("series ring orders agree")
    }

    fn neg(&self, a: &TruncSeries) -> TruncSeries {
        a.neg(&self.ctx)
    }

    fn mul(&self, a: &TruncSeries, b: &TruncSeries) -> TruncSeries {
        a.mul(&self.ctx, b).expect("series ring orders agree")
    }

    fn is_zero(&self, a: &TruncSeries) -> bool {
        a.is_zero(&self.ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn one_plus_t_squared_mod_t2() {
        let f7 = FieldCtx::new(7, 1).unwrap();
        let s = TruncSeries { coeffs: vec![f7.from_u64(1), f7.from_u64(1)] };
        let sq = s.mul(&f7, &s).unwrap();
        assert_eq!(sq.coeffs, vec![f7.from_u64(1), f7.from_u64(2)]);
    }

    #[test]
    fn order_mismatch_is_an_error() {
        let f7 = FieldCtx::new(7, 1).unwrap();
        let a = TruncSeries::zero(&f7, 2);
        let b = TruncSeries::zero(&f7, 3);
        assert!(matches!(a.add(&f7, &b), Err(Error::OrderMismatch(2, 3))));
    }

    #[test]
    fn shift_roundtrip() {
        let f7 = FieldCtx::new(7, 1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        for _ in 0..100 {
            let p = Poly::random(&f7, &mut rng, 3);
            let s = TruncSeries::from_poly(&f7, &p, 4);
            let tau = f7.random(&mut rng);
            let back = s.shift(&f7, &tau).shift(&f7, &f7.neg(&tau));
            assert_eq!(back, s);
        }
    }

    #[test]
    fn poly_shift_into_series_is_ring_homomorphism() {
        // For polynomials a, b: (a*b)(t+tau) mod t^r equals the product of
        // the individually shifted truncations.
        let f5 = FieldCtx::new(5, 1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(22);
        for _ in 0..200 {
            let a = Poly::random(&f5, &mut rng, 6);
            let b = Poly::random(&f5, &mut rng, 6);
            let tau = f5.random(&mut rng);
            let r = 3;
            let lhs = a.mul(&f5, &b).shift_mod(&f5, &tau, r);
            let rhs = a
                .shift_mod(&f5, &tau, r)
                .mul(&f5, &b.shift_mod(&f5, &tau, r))
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}
