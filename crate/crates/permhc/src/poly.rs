//! Dense univariate polynomials over a [`FieldCtx`].
//!
//! Canonical form: no trailing zero coefficients, the zero polynomial is the
//! empty vector (degree "minus infinity"). Schoolbook multiplication is
//! deliberate; none of the callers need anything faster.

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::series::TruncSeries;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    pub(crate) coeffs: Vec<FieldElem>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: vec![] }
    }

    pub fn from_coeffs(ctx: &FieldCtx, coeffs: Vec<FieldElem>) -> Poly {
        let mut p = Poly { coeffs };
        p.trim(ctx);
        p
    }

    pub fn constant(ctx: &FieldCtx, c: FieldElem) -> Poly {
        Poly::from_coeffs(ctx, vec![c])
    }

    /// The monomial `c * t^d`.
    pub fn monomial(ctx: &FieldCtx, c: FieldElem, d: usize) -> Poly {
        if ctx.is_zero(&c) {
            return Poly::zero();
        }
        let mut coeffs = vec![ctx.zero(); d + 1];
        coeffs[d] = c;
        Poly { coeffs }
    }

    fn trim(&mut self, ctx: &FieldCtx) {
        while self.coeffs.last().map_or(false, |c| ctx.is_zero(c)) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, ctx: &FieldCtx, i: usize) -> FieldElem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| ctx.zero())
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn add(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| ctx.add(&self.coeff(ctx, i), &other.coeff(ctx, i)))
            .collect();
        Poly::from_coeffs(ctx, coeffs)
    }

    pub fn sub(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| ctx.sub(&self.coeff(ctx, i), &other.coeff(ctx, i)))
            .collect();
        Poly::from_coeffs(ctx, coeffs)
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![ctx.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if ctx.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let prod = ctx.mul(a, b);
                coeffs[i + j] = ctx.add(&coeffs[i + j], &prod);
            }
        }
        Poly::from_coeffs(ctx, coeffs)
    }

    pub fn scale(&self, ctx: &FieldCtx, s: &FieldElem) -> Poly {
        let coeffs = self.coeffs.iter().map(|c| ctx.mul(c, s)).collect();
        Poly::from_coeffs(ctx, coeffs)
    }

    pub fn eval(&self, ctx: &FieldCtx, x: &FieldElem) -> FieldElem {
        let mut acc = ctx.zero();
        for c in self.coeffs.iter().rev() {
            acc = ctx.add(&ctx.mul(&acc, x), c);
        }
        acc
    }

    /// Taylor shift: returns `self(t + tau)` exactly. In-place synthetic
    /// division by `(t - (-tau))`, repeated; works over any characteristic.
    pub fn shift(&self, ctx: &FieldCtx, tau: &FieldElem) -> Poly {
        let mut c = self.coeffs.clone();
        let n = c.len();
        if n == 0 {
            return Poly::zero();
        }
        for j in 0..n.saturating_sub(1) {
            for i in (j..n - 1).rev() {
                let t = ctx.mul(tau, &c[i + 1]);
                c[i] = ctx.add(&c[i], &t);
            }
        }
        Poly::from_coeffs(ctx, c)
    }

    /// `self(t + tau) mod t^r` without materialising the full shift; only the
    /// first `r` shifted coefficients are produced, in `O(deg * r)` work.
    pub fn shift_mod(&self, ctx: &FieldCtx, tau: &FieldElem, r: usize) -> TruncSeries {
        let n = self.coeffs.len();
        let mut c = self.coeffs.clone();
        let steps = r.min(n.saturating_sub(1));
        for j in 0..steps {
            for i in (j..n - 1).rev() {
                let t = ctx.mul(tau, &c[i + 1]);
                c[i] = ctx.add(&c[i], &t);
            }
        }
        let mut out = vec![ctx.zero(); r];
        for (i, slot) in out.iter_mut().enumerate().take(n.min(r)) {
            *slot = c[i].clone();
        }
        TruncSeries { coeffs: out }
    }

    /// Division with remainder by a nonzero divisor.
    pub fn divrem(&self, ctx: &FieldCtx, divisor: &Poly) -> Result<(Poly, Poly)> {
        if divisor.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let dd = divisor.degree().unwrap();
        let lead_inv = ctx.inv(&divisor.coeffs[dd])?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![ctx.zero(); rem.len() - dd];
        while rem.len() > dd {
            let c = ctx.mul(rem.last().unwrap(), &lead_inv);
            let shift = rem.len() - 1 - dd;
            if !ctx.is_zero(&c) {
                quot[shift] = c.clone();
                for (k, dk) in divisor.coeffs.iter().enumerate() {
                    let sub = ctx.mul(&c, dk);
                    rem[shift + k] = ctx.sub(&rem[shift + k], &sub);
                }
            }
            rem.pop();
            while rem.last().map_or(false, |x| ctx.is_zero(x)) {
                rem.pop();
            }
        }
        Ok((Poly::from_coeffs(ctx, quot), Poly::from_coeffs(ctx, rem)))
    }

    /// `(t - tau)^e`, a small helper several callers share.
    pub fn linear_power(ctx: &FieldCtx, tau: &FieldElem, e: usize) -> Poly {
        let lin = Poly::from_coeffs(ctx, vec![ctx.neg(tau), ctx.one()]);
        let mut out = Poly::constant(ctx, ctx.one());
        for _ in 0..e {
            out = out.mul(ctx, &lin);
        }
        out
    }

    pub fn random<R: rand::Rng>(ctx: &FieldCtx, rng: &mut R, max_degree: usize) -> Poly {
        let coeffs = (0..=max_degree).map(|_| ctx.random(rng)).collect();
        Poly::from_coeffs(ctx, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn f(ctx: &FieldCtx, v: u64) -> FieldElem {
        ctx.from_u64(v)
    }

    #[test]
    fn zero_poly_is_empty() {
        let f5 = FieldCtx::new(5, 1).unwrap();
        let z = Poly::from_coeffs(&f5, vec![f5.zero(), f5.zero()]);
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
    }

    #[test]
    fn shift_t_squared_over_f5() {
        // (t+1)^2 = t^2 + 2t + 1; truncated to order 2 this is 2t + 1.
        let f5 = FieldCtx::new(5, 1).unwrap();
        let q = Poly::monomial(&f5, f5.one(), 2);
        let s = q.shift_mod(&f5, &f(&f5, 1), 2);
        assert_eq!(s.coeffs, vec![f(&f5, 1), f(&f5, 2)]);
        let full = q.shift(&f5, &f(&f5, 1));
        assert_eq!(full.coeffs, vec![f(&f5, 1), f(&f5, 2), f(&f5, 1)]);
    }

    #[test]
    fn shift_roundtrip_random() {
        let f7 = FieldCtx::new(7, 1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..100 {
            let p = Poly::random(&f7, &mut rng, 9);
            let tau = f7.random(&mut rng);
            let back = p.shift(&f7, &tau).shift(&f7, &f7.neg(&tau));
            assert_eq!(back, p);
        }
    }

    #[test]
    fn divrem_reconstructs() {
        let f7 = FieldCtx::new(7, 1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        for _ in 0..100 {
            let a = Poly::random(&f7, &mut rng, 8);
            let mut b = Poly::random(&f7, &mut rng, 3);
            if b.is_zero() {
                b = Poly::constant(&f7, f7.one());
            }
            let (q, r) = a.divrem(&f7, &b).unwrap();
            let back = q.mul(&f7, &b).add(&f7, &r);
            assert_eq!(back, a);
            if !r.is_zero() {
                assert!(r.degree().unwrap() < b.degree().unwrap());
            }
        }
    }

    #[test]
    fn shift_is_evaluation_compatible() {
        let f7 = FieldCtx::new(7, 1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        for _ in 0..50 {
            let p = Poly::random(&f7, &mut rng, 6);
            let tau = f7.random(&mut rng);
            let x = f7.random(&mut rng);
            let lhs = p.shift(&f7, &tau).eval(&f7, &x);
            let rhs = p.eval(&f7, &f7.add(&x, &tau));
            assert_eq!(lhs, rhs);
        }
    }
}
