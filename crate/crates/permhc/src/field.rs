//! Finite field arithmetic for `F_p` and `F_{p^ell}`.
//!
//! A [`FieldCtx`] fixes the characteristic `p`, the extension degree `ell`
//! and (for `ell >= 2`) a monic irreducible modulus over `F_p`. Elements are
//! fixed-length coefficient vectors, reduced eagerly, so equality is plain
//! componentwise comparison. Two contexts with the same `(p, ell, modulus)`
//! define element-wise identical arithmetic.

use crate::error::{Error, Result};
use smallvec::{smallvec, SmallVec};

/// Largest extension degree we accept. The pipeline never needs more.
pub const MAX_EXT_DEGREE: usize = 32;

type Limbs = SmallVec<[u64; 4]>;

/// An element of `F_{p^ell}`: `coeffs[i]` is the coefficient of `x^i`,
/// always of length `ell` with every limb in `[0, p)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldElem {
    pub(crate) coeffs: Limbs,
}

impl FieldElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
}

/// Context for `F_q`, `q = p^ell`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldCtx {
    p: u64,
    ell: usize,
    q: u64,
    /// Monic irreducible of degree `ell` over `F_p`, coefficients ascending,
    /// length `ell + 1`. `None` exactly when `ell == 1`.
    modulus: Option<Vec<u64>>,
}

impl FieldCtx {
    /// Builds `F_{p^ell}`. For `ell >= 2` the modulus is the lexicographically
    /// smallest monic irreducible of degree `ell`: candidates are ordered by
    /// the base-`p` integer whose digit `i` is the coefficient of `x^i`.
    pub fn new(p: u64, ell: usize) -> Result<FieldCtx> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        if ell == 0 || ell > MAX_EXT_DEGREE {
            return Err(Error::BadExtensionDegree);
        }
        let mut q: u64 = 1;
        for _ in 0..ell {
            q = q.checked_mul(p).ok_or(Error::FieldTooLarge)?;
        }
        let modulus = if ell == 1 {
            None
        } else {
            Some(find_irreducible(p, ell, q)?)
        };
        Ok(FieldCtx { p, ell, q, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> Option<&[u64]> {
        self.modulus.as_deref()
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem { coeffs: smallvec![0; self.ell] }
    }

    pub fn one(&self) -> FieldElem {
        self.from_u64(1)
    }

    pub fn from_u64(&self, v: u64) -> FieldElem {
        let mut coeffs: Limbs = smallvec![0; self.ell];
        coeffs[0] = v % self.p;
        FieldElem { coeffs }
    }

    pub fn from_i64(&self, v: i64) -> FieldElem {
        let p = self.p as i128;
        self.from_u64(((v as i128).rem_euclid(p)) as u64)
    }

    /// Element from explicit coefficients (length must not exceed `ell`).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElem> {
        if coeffs.len() > self.ell {
            return Err(Error::Dimension(format!(
                "element has {} coefficients, field degree is {}",
                coeffs.len(),
                self.ell
            )));
        }
        let mut out: Limbs = smallvec![0; self.ell];
        for (i, &c) in coeffs.iter().enumerate() {
            out[i] = c % self.p;
        }
        Ok(FieldElem { coeffs: out })
    }

    pub fn is_zero(&self, a: &FieldElem) -> bool {
        a.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let p = self.p;
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| {
                let s = x + y;
                if s >= p {
                    s - p
                } else {
                    s
                }
            })
            .collect();
        FieldElem { coeffs }
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        let p = self.p;
        let coeffs = a
            .coeffs
            .iter()
            .map(|&x| if x == 0 { 0 } else { p - x })
            .collect();
        FieldElem { coeffs }
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let p = self.p;
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| if x >= y { x - y } else { x + p - y })
            .collect();
        FieldElem { coeffs }
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        if self.ell == 1 {
            return FieldElem {
                coeffs: smallvec![mulmod(a.coeffs[0], b.coeffs[0], self.p)],
            };
        }
        let p = self.p;
        let ell = self.ell;
        // Schoolbook convolution, accumulating in u128 to delay reductions.
        let mut acc: SmallVec<[u128; 8]> = smallvec![0u128; 2 * ell - 1];
        for i in 0..ell {
            let ai = a.coeffs[i];
            if ai == 0 {
                continue;
            }
            for j in 0..ell {
                acc[i + j] += (ai as u128) * (b.coeffs[j] as u128);
            }
        }
        let mut full: SmallVec<[u64; 8]> = acc.iter().map(|&v| (v % p as u128) as u64).collect();
        // Reduce by the monic modulus, high degree first.
        let m = self.modulus.as_ref().expect("extension field has modulus");
        for d in (ell..full.len()).rev() {
            let c = full[d];
            if c == 0 {
                continue;
            }
            full[d] = 0;
            let shift = d - ell;
            for (k, &mk) in m.iter().enumerate().take(ell) {
                if mk == 0 {
                    continue;
                }
                let sub = mulmod(c, mk, p);
                let idx = shift + k;
                full[idx] = if full[idx] >= sub { full[idx] - sub } else { full[idx] + p - sub };
            }
        }
        FieldElem { coeffs: full[..ell].iter().copied().collect() }
    }

    pub fn pow(&self, a: &FieldElem, mut e: u64) -> FieldElem {
        let mut base = a.clone();
        let mut out = self.one();
        while e > 0 {
            if e & 1 == 1 {
                out = self.mul(&out, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        out
    }

    /// Multiplicative inverse; `inv(0)` is an error, never a silent value.
    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem> {
        if self.is_zero(a) {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, self.q - 2))
    }

    /// Canonical index of an element in `[0, q)`: sum of `coeffs[i] * p^i`.
    pub fn elem_index(&self, a: &FieldElem) -> u64 {
        let mut idx: u64 = 0;
        for &c in a.coeffs.iter().rev() {
            idx = idx * self.p + c;
        }
        idx
    }

    pub fn elem_from_index(&self, mut idx: u64) -> FieldElem {
        let mut coeffs: Limbs = smallvec![0; self.ell];
        for c in coeffs.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        FieldElem { coeffs }
    }

    /// All field elements in canonical index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.q).map(move |i| self.elem_from_index(i))
    }

    pub fn random<R: rand::Rng>(&self, rng: &mut R) -> FieldElem {
        let coeffs = (0..self.ell).map(|_| rng.gen_range(0..self.p)).collect();
        FieldElem { coeffs }
    }

    /// Renders an element: a bare residue for prime fields, a coefficient
    /// list `[c0,c1,...]` for extensions.
    pub fn format_elem(&self, a: &FieldElem) -> String {
        if self.ell == 1 {
            a.coeffs[0].to_string()
        } else {
            let parts: Vec<String> = a.coeffs.iter().map(|c| c.to_string()).collect();
            format!("[{}]", parts.join(","))
        }
    }
}

pub(crate) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Deterministic Miller-Rabin, valid for all u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &sp in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == sp {
            return true;
        }
        if n % sp == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u64(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn powmod_u64(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut out = 1u64 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            out = mulmod(out, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    out
}

// ---------------------------------------------------------------------------
// Dense polynomial arithmetic over F_p, used only for the irreducibility
// search. Coefficients ascending, trailing zeros trimmed.
// ---------------------------------------------------------------------------

fn ptrim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn pmul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(ai, bj, p)) % p;
        }
    }
    ptrim(&mut out);
    out
}

/// Remainder of `a` modulo monic `f`.
fn pmod(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    ptrim(&mut r);
    let df = f.len() - 1;
    while r.len() > df {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - df;
        if c != 0 {
            for (k, &fk) in f.iter().enumerate().take(df) {
                if fk == 0 {
                    continue;
                }
                let idx = shift + k;
                let sub = mulmod(c, fk, p);
                r[idx] = (r[idx] + p - sub) % p;
            }
        }
        r.pop();
        ptrim(&mut r);
    }
    r
}

fn ppowmod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    let mut b = pmod(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            out = pmod(&pmul(&out, &b, p), f, p);
        }
        b = pmod(&pmul(&b, &b, p), f, p);
        e >>= 1;
    }
    out
}

fn pgcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    ptrim(&mut a);
    ptrim(&mut b);
    while !b.is_empty() {
        // Make b monic before reducing.
        let lead = *b.last().unwrap();
        let inv = powmod_u64(lead, p - 2, p);
        let monic: Vec<u64> = b.iter().map(|&c| mulmod(c, inv, p)).collect();
        let r = pmod(&a, &monic, p);
        a = b;
        b = r;
    }
    a
}

fn psub_x(a: &[u64], p: u64) -> Vec<u64> {
    // a(x) - x
    let mut out = a.to_vec();
    if out.len() < 2 {
        out.resize(2, 0);
    }
    out[1] = (out[1] + p - 1) % p;
    ptrim(&mut out);
    out
}

/// Monic degree-`ell` polynomial `f` is irreducible over `F_p` iff
/// `x^(p^ell) == x (mod f)` and `gcd(x^(p^(ell/t)) - x, f) == 1`
/// for every prime `t` dividing `ell`.
fn is_irreducible(f: &[u64], p: u64, ell: usize) -> bool {
    let x = vec![0u64, 1];
    // g := x^(p^d) computed by d successive p-th powers.
    let frob = |d: usize| -> Vec<u64> {
        let mut g = x.clone();
        for _ in 0..d {
            g = ppowmod(&g, p, f, p);
        }
        g
    };
    let top = frob(ell);
    if pmod(&psub_x(&top, p), f, p) != Vec::<u64>::new() {
        return false;
    }
    let mut rem = ell;
    let mut t = 2usize;
    let mut prime_divisors = Vec::new();
    while t * t <= rem {
        if rem % t == 0 {
            prime_divisors.push(t);
            while rem % t == 0 {
                rem /= t;
            }
        }
        t += 1;
    }
    if rem > 1 {
        prime_divisors.push(rem);
    }
    for t in prime_divisors {
        let g = frob(ell / t);
        let diff = psub_x(&g, p);
        let gc = pgcd(f, &diff, p);
        if gc.len() != 1 {
            return false;
        }
    }
    true
}

fn find_irreducible(p: u64, ell: usize, q: u64) -> Result<Vec<u64>> {
    for idx in 0..q {
        let mut f = vec![0u64; ell + 1];
        let mut v = idx;
        for c in f.iter_mut().take(ell) {
            *c = v % p;
            v /= p;
        }
        f[ell] = 1;
        if is_irreducible(&f, p, ell) {
            return Ok(f);
        }
    }
    Err(Error::Internal(format!(
        "no irreducible polynomial of degree {ell} over F_{p}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn prime_field_no_modulus() {
        let f7 = FieldCtx::new(7, 1).unwrap();
        assert_eq!(f7.q(), 7);
        assert!(f7.modulus().is_none());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(FieldCtx::new(6, 1), Err(Error::NotPrime(6))));
        assert!(matches!(FieldCtx::new(7, 0), Err(Error::BadExtensionDegree)));
    }

    #[test]
    fn f4_modulus_is_x2_x_1() {
        let f4 = FieldCtx::new(2, 2).unwrap();
        assert_eq!(f4.modulus(), Some(&[1u64, 1, 1][..]));
    }

    #[test]
    fn f9_modulus_matches_enumeration_oracle() {
        // Oracle: walk all monic quadratics over F_3 in canonical order and
        // take the first with no root (degree 2, so root-free = irreducible).
        let p = 3u64;
        let mut expect = None;
        'outer: for idx in 0..9u64 {
            let c0 = idx % 3;
            let c1 = idx / 3;
            for x in 0..p {
                let v = (x * x + c1 * x + c0) % p;
                if v == 0 {
                    continue 'outer;
                }
            }
            expect = Some(vec![c0, c1, 1]);
            break;
        }
        let f9 = FieldCtx::new(3, 2).unwrap();
        assert_eq!(f9.modulus().unwrap(), expect.unwrap().as_slice());
        // Frozen value: x^2 + 1 is the first root-free monic quadratic.
        assert_eq!(f9.modulus(), Some(&[1u64, 0, 1][..]));
    }

    #[test]
    fn f7_arith_examples() {
        let f7 = FieldCtx::new(7, 1).unwrap();
        let a = f7.from_u64(3);
        let b = f7.from_u64(5);
        assert_eq!(f7.add(&a, &b), f7.from_u64(1));
        assert_eq!(f7.inv(&a).unwrap(), f7.from_u64(5));
        assert!(f7.inv(&f7.zero()).is_err());
    }

    #[test]
    fn f4_x_squared() {
        let f4 = FieldCtx::new(2, 2).unwrap();
        let x = f4.from_coeffs(&[0, 1]).unwrap();
        let xx = f4.mul(&x, &x);
        assert_eq!(xx, f4.from_coeffs(&[1, 1]).unwrap());
    }

    #[test]
    fn field_axioms_sampled() {
        for (p, ell) in [(2u64, 1usize), (3, 1), (7, 1), (2, 4), (3, 2)] {
            let f = FieldCtx::new(p, ell).unwrap();
            let mut rng = ChaCha12Rng::seed_from_u64(0x5eed ^ (p << 8) ^ ell as u64);
            for _ in 0..1000 {
                let a = f.random(&mut rng);
                let b = f.random(&mut rng);
                let c = f.random(&mut rng);
                assert_eq!(f.add(&a, &b), f.add(&b, &a));
                assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
                assert_eq!(f.add(&f.add(&a, &b), &c), f.add(&a, &f.add(&b, &c)));
                assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
                assert_eq!(
                    f.mul(&a, &f.add(&b, &c)),
                    f.add(&f.mul(&a, &b), &f.mul(&a, &c))
                );
                assert_eq!(f.add(&a, &f.neg(&a)), f.zero());
                assert_eq!(f.sub(&a, &b), f.add(&a, &f.neg(&b)));
                if !f.is_zero(&a) {
                    let ia = f.inv(&a).unwrap();
                    assert_eq!(f.mul(&a, &ia), f.one());
                }
            }
        }
    }

    #[test]
    fn frobenius_fixes_field() {
        for (p, ell) in [(2u64, 1usize), (3, 1), (7, 1), (2, 4), (3, 2)] {
            let f = FieldCtx::new(p, ell).unwrap();
            let mut rng = ChaCha12Rng::seed_from_u64(99 + p + ell as u64);
            for _ in 0..200 {
                let a = f.random(&mut rng);
                assert_eq!(f.pow(&a, f.q()), a);
            }
        }
    }

    #[test]
    fn index_roundtrip() {
        let f = FieldCtx::new(3, 2).unwrap();
        for i in 0..f.q() {
            let e = f.elem_from_index(i);
            assert_eq!(f.elem_index(&e), i);
        }
        assert_eq!(f.elements().count() as u64, f.q());
    }

    #[test]
    fn extension_inverse_roundtrip() {
        let f = FieldCtx::new(2, 10).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = f.random(&mut rng);
            if f.is_zero(&a) {
                continue;
            }
            let ia = f.inv(&a).unwrap();
            assert_eq!(f.mul(&a, &ia), f.one());
        }
    }
}
