//! Reference algorithms used as ground truth everywhere else: brute-force
//! enumeration, Ryser's formula, the Hamiltonian-cycle subset DP, and the
//! spanning-tree determinant characterization of single-cycle permutations.

use crate::error::{Error, Result};
use crate::field::{is_prime_u64, FieldCtx, FieldElem};
use crate::matrix::{FieldMatrix, IntMatrix, Matrix};
use crate::ring::{IntRing, Ring};
use num_bigint::BigInt;

/// Default size cap for the brute-force strategies.
pub const BRUTE_CAP: usize = 10;
/// Practical cap for the big-integer oracles.
pub const INT_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PerStrategy {
    Brute,
    Ryser,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HcStrategy {
    Brute,
    Dp,
}

/// Lexicographic in-place next permutation; returns false after the last one.
fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

pub fn per_oracle<R: Ring>(
    ring: &R,
    a: &Matrix<R::Elem>,
    strategy: PerStrategy,
) -> Result<R::Elem> {
    match strategy {
        PerStrategy::Brute => per_brute(ring, a, BRUTE_CAP),
        PerStrategy::Ryser => Ok(per_ryser(ring, a)),
    }
}

pub fn hc_oracle<R: Ring>(ring: &R, a: &Matrix<R::Elem>, strategy: HcStrategy) -> Result<R::Elem> {
    match strategy {
        HcStrategy::Brute => hc_brute(ring, a, BRUTE_CAP),
        HcStrategy::Dp => Ok(hc_dp(ring, a)),
    }
}

/// Permanent by enumerating all permutations. Capped; returns the ring's one
/// for the empty matrix (empty product convention).
pub fn per_brute<R: Ring>(ring: &R, a: &Matrix<R::Elem>, cap: usize) -> Result<R::Elem> {
    let n = a.n();
    if n == 0 {
        return Ok(ring.one());
    }
    if n > cap {
        return Err(Error::BruteCap { n, cap });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = ring.zero();
    loop {
        let mut prod = ring.one();
        for (i, &j) in perm.iter().enumerate() {
            prod = ring.mul(&prod, a.get(i, j));
        }
        total = ring.add(&total, &prod);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(total)
}

/// Ryser's inclusion-exclusion formula, `O(n 2^n)` ring operations, iterating
/// column subsets in Gray-code order so each step updates one row sum.
pub fn per_ryser<R: Ring>(ring: &R, a: &Matrix<R::Elem>) -> R::Elem {
    let n = a.n();
    if n == 0 {
        return ring.one();
    }
    assert!(n < 32, "Ryser subset masks are u32");
    let mut row_sums: Vec<R::Elem> = vec![ring.zero(); n];
    let mut total = ring.zero();
    let mut prev_mask: u32 = 0;
    for s in 1u64..(1u64 << n) {
        let mask = (s ^ (s >> 1)) as u32;
        let flipped = (mask ^ prev_mask).trailing_zeros() as usize;
        if mask & (1 << flipped) != 0 {
            for (i, rs) in row_sums.iter_mut().enumerate() {
                *rs = ring.add(rs, a.get(i, flipped));
            }
        } else {
            for (i, rs) in row_sums.iter_mut().enumerate() {
                *rs = ring.sub(rs, a.get(i, flipped));
            }
        }
        prev_mask = mask;
        let mut prod = ring.one();
        for rs in &row_sums {
            prod = ring.mul(&prod, rs);
        }
        // Sign (-1)^(n - |S|).
        if (n - mask.count_ones() as usize) % 2 == 0 {
            total = ring.add(&total, &prod);
        } else {
            total = ring.sub(&total, &prod);
        }
    }
    total
}

/// Hamiltonian-cycle polynomial by enumerating single-cycle permutations:
/// each cycle through all vertices is a permutation of `1..n` appended to
/// vertex `0`. For `n = 1` the value is the single entry.
pub fn hc_brute<R: Ring>(ring: &R, a: &Matrix<R::Elem>, cap: usize) -> Result<R::Elem> {
    let n = a.n();
    if n == 0 {
        return Err(Error::Dimension("hc needs n >= 1".into()));
    }
    if n > cap {
        return Err(Error::BruteCap { n, cap });
    }
    if n == 1 {
        return Ok(a.get(0, 0).clone());
    }
    let mut order: Vec<usize> = (1..n).collect();
    let mut total = ring.zero();
    loop {
        let mut prod = a.get(0, order[0]).clone();
        for w in order.windows(2) {
            prod = ring.mul(&prod, a.get(w[0], w[1]));
        }
        prod = ring.mul(&prod, a.get(*order.last().unwrap(), 0));
        total = ring.add(&total, &prod);
        if !next_permutation(&mut order) {
            break;
        }
    }
    Ok(total)
}

/// Hamiltonian-cycle polynomial by subset DP over walks from vertex 0,
/// `O(2^n n^2)` ring operations.
pub fn hc_dp<R: Ring>(ring: &R, a: &Matrix<R::Elem>) -> R::Elem {
    let n = a.n();
    assert!(n >= 1, "hc needs n >= 1");
    if n == 1 {
        return a.get(0, 0).clone();
    }
    assert!(n < 32, "subset DP masks are u32");
    let full: u32 = (1 << n) - 1;
    // dp[mask][v]: sum over simple paths 0 -> v visiting exactly `mask`.
    let mut dp: Vec<Vec<R::Elem>> = vec![vec![ring.zero(); n]; 1 << n];
    dp[1][0] = ring.one();
    for mask in 1u32..=full {
        if mask & 1 == 0 {
            continue;
        }
        for v in 0..n {
            if mask & (1 << v) == 0 {
                continue;
            }
            if ring.is_zero(&dp[mask as usize][v]) {
                continue;
            }
            let base = dp[mask as usize][v].clone();
            for w in 1..n {
                if mask & (1 << w) != 0 {
                    continue;
                }
                let step = ring.mul(&base, a.get(v, w));
                let next = (mask | (1 << w)) as usize;
                dp[next][w] = ring.add(&dp[next][w], &step);
            }
        }
    }
    let mut total = ring.zero();
    for v in 1..n {
        let close = ring.mul(&dp[full as usize][v], a.get(v, 0));
        total = ring.add(&total, &close);
    }
    total
}

/// Determinant over a field by Gaussian elimination with pivoting.
pub fn det_field(ctx: &FieldCtx, a: &FieldMatrix) -> Result<FieldElem> {
    let n = a.n();
    if n == 0 {
        return Ok(ctx.one());
    }
    let mut m: Vec<Vec<FieldElem>> = (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j).clone()).collect())
        .collect();
    let mut det = ctx.one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !ctx.is_zero(&m[r][col]));
        let Some(pivot) = pivot else {
            return Ok(ctx.zero());
        };
        if pivot != col {
            m.swap(pivot, col);
            det = ctx.neg(&det);
        }
        let pv = m[col][col].clone();
        det = ctx.mul(&det, &pv);
        let pinv = ctx.inv(&pv)?;
        for r in col + 1..n {
            if ctx.is_zero(&m[r][col]) {
                continue;
            }
            let factor = ctx.mul(&m[r][col], &pinv);
            for c in col..n {
                let sub = ctx.mul(&factor, &m[col][c]);
                m[r][c] = ctx.sub(&m[r][c], &sub);
            }
        }
    }
    Ok(det)
}

/// The spanning-tree indicator: `det((I - P_sigma) with row 1 and column 1
/// deleted)`, which is 1 iff `sigma` is a single cycle, else 0. Computed over
/// a prime field larger than `n` and mapped back to `{0, 1}`.
pub fn ham_indicator_det(sigma: &[usize]) -> Result<u8> {
    let n = sigma.len();
    if n == 0 {
        return Err(Error::Dimension("permutation must be nonempty".into()));
    }
    let mut seen = vec![false; n];
    for &v in sigma {
        if v >= n || seen[v] {
            return Err(Error::Dimension("not a permutation".into()));
        }
        seen[v] = true;
    }
    if n == 1 {
        // Empty minor: det of the 0x0 matrix is 1, matching the single cycle.
        return Ok(1);
    }
    let mut p = n as u64 + 1;
    while !is_prime_u64(p) {
        p += 1;
    }
    let ctx = FieldCtx::new(p, 1)?;
    // (I - P_sigma) with row 0 and column 0 deleted.
    let m = Matrix::from_fn(n - 1, |i, j| {
        let (r, c) = (i + 1, j + 1);
        let ident = if r == c { 1i64 } else { 0 };
        let perm = if sigma[r] == c { 1i64 } else { 0 };
        ctx.from_i64(ident - perm)
    });
    let d = det_field(&ctx, &m)?;
    if ctx.is_zero(&d) {
        Ok(0)
    } else if d == ctx.one() {
        Ok(1)
    } else {
        Err(Error::Internal(format!(
            "spanning-tree determinant is {}, expected 0 or 1",
            ctx.format_elem(&d)
        )))
    }
}

/// Exact integer permanent (Ryser over big integers), capped at n = 20.
pub fn per_int_oracle(a: &IntMatrix) -> Result<BigInt> {
    let n = a.n();
    if n > INT_CAP {
        return Err(Error::IntCap { n, cap: INT_CAP });
    }
    Ok(per_ryser(&IntRing, a))
}

/// Exact integer Hamiltonian-cycle polynomial, capped at n = 20.
pub fn hc_int_oracle(a: &IntMatrix) -> Result<BigInt> {
    let n = a.n();
    if n > INT_CAP {
        return Err(Error::IntCap { n, cap: INT_CAP });
    }
    if n == 0 {
        return Err(Error::Dimension("hc needs n >= 1".into()));
    }
    Ok(hc_dp(&IntRing, a))
}

/// Number of cycles of a permutation; test helper for the determinant
/// characterization.
pub fn cycle_count(sigma: &[usize]) -> usize {
    let n = sigma.len();
    let mut seen = vec![false; n];
    let mut cycles = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            v = sigma[v];
        }
    }
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn int_matrix(rows: &[&[i64]]) -> IntMatrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn per_2x2_int() {
        let a = int_matrix(&[&[1, 2], &[3, 4]]);
        assert_eq!(per_brute(&IntRing, &a, 10).unwrap(), BigInt::from(10));
        assert_eq!(per_ryser(&IntRing, &a), BigInt::from(10));
    }

    #[test]
    fn per_identity_is_one() {
        let f7 = FieldCtx::new(7, 1).unwrap();
        for n in 1..6 {
            let id = FieldMatrix::identity(&f7, n);
            assert_eq!(per_ryser(&f7, &id), f7.one());
            assert_eq!(per_brute(&f7, &id, 10).unwrap(), f7.one());
        }
    }

    #[test]
    fn per_empty_matrix_is_one() {
        let a: IntMatrix = Matrix::from_vec(0, vec![]).unwrap();
        assert_eq!(per_brute(&IntRing, &a, 10).unwrap(), BigInt::from(1));
        assert_eq!(per_ryser(&IntRing, &a), BigInt::from(1));
    }

    #[test]
    fn brute_cap_enforced() {
        let f2 = FieldCtx::new(2, 1).unwrap();
        let a = FieldMatrix::identity(&f2, 5);
        assert!(matches!(
            per_brute(&f2, &a, 4),
            Err(Error::BruteCap { n: 5, cap: 4 })
        ));
    }

    #[test]
    fn hc_all_ones_4x4() {
        let a = int_matrix(&[&[1; 4], &[1; 4], &[1; 4], &[1; 4]]);
        assert_eq!(hc_brute(&IntRing, &a, 10).unwrap(), BigInt::from(6));
        assert_eq!(hc_dp(&IntRing, &a), BigInt::from(6));
    }

    #[test]
    fn hc_2x2_is_antidiagonal_product() {
        let a = int_matrix(&[&[1, 2], &[3, 4]]);
        assert_eq!(hc_dp(&IntRing, &a), BigInt::from(6)); // b*c = 2*3
    }

    #[test]
    fn hc_1x1_is_entry() {
        let a = int_matrix(&[&[5]]);
        assert_eq!(hc_brute(&IntRing, &a, 10).unwrap(), BigInt::from(5));
        assert_eq!(hc_dp(&IntRing, &a), BigInt::from(5));
    }

    #[test]
    fn cross_strategy_equivalence_fields() {
        for q in [2u64, 7, 101] {
            let ctx = FieldCtx::new(q, 1).unwrap();
            let mut rng = ChaCha12Rng::seed_from_u64(1000 + q);
            for _ in 0..100 {
                let n = rng.gen_range(1..=6);
                let a = FieldMatrix::random(&ctx, &mut rng, n);
                assert_eq!(
                    per_brute(&ctx, &a, 10).unwrap(),
                    per_ryser(&ctx, &a),
                    "per mismatch over F_{q}"
                );
                assert_eq!(
                    hc_brute(&ctx, &a, 10).unwrap(),
                    hc_dp(&ctx, &a),
                    "hc mismatch over F_{q}"
                );
            }
        }
    }

    #[test]
    fn determinant_characterization_small() {
        // All permutations up to n = 6; n = 7 runs in the acceptance suite.
        for n in 1..=6usize {
            let mut perm: Vec<usize> = (0..n).collect();
            loop {
                let expect = u8::from(cycle_count(&perm) == 1);
                assert_eq!(ham_indicator_det(&perm).unwrap(), expect, "sigma {perm:?}");
                if !next_permutation(&mut perm) {
                    break;
                }
            }
        }
    }

    #[test]
    fn ham_indicator_examples() {
        assert_eq!(ham_indicator_det(&[0, 1, 2]).unwrap(), 0);
        assert_eq!(ham_indicator_det(&[1, 2, 0]).unwrap(), 1);
        assert!(ham_indicator_det(&[0, 0, 2]).is_err());
    }

    #[test]
    fn int_oracles() {
        let ones = int_matrix(&[&[1, 1], &[1, 1]]);
        assert_eq!(per_int_oracle(&ones).unwrap(), BigInt::from(2));
        let big = Matrix::from_fn(10, |_, _| BigInt::from(1));
        assert_eq!(per_int_oracle(&big).unwrap(), BigInt::from(3628800));
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        for _ in 0..5 {
            let a = Matrix::from_fn(8, |_, _| BigInt::from(rng.gen_range(-1000i64..=1000)));
            assert_eq!(per_int_oracle(&a).unwrap(), per_brute(&IntRing, &a, 10).unwrap());
        }
    }

    #[test]
    fn homogeneity_of_degree_n() {
        let f13 = FieldCtx::new(13, 1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        for _ in 0..30 {
            let n = rng.gen_range(1..=5);
            let a = FieldMatrix::random(&f13, &mut rng, n);
            let lam = f13.random(&mut rng);
            let scaled = a.map(|e| f13.mul(e, &lam));
            let factor = f13.pow(&lam, n as u64);
            assert_eq!(per_ryser(&f13, &scaled), f13.mul(&factor, &per_ryser(&f13, &a)));
            assert_eq!(hc_dp(&f13, &scaled), f13.mul(&factor, &hc_dp(&f13, &a)));
        }
    }

    #[test]
    fn hc_multilinear_in_rows() {
        let f13 = FieldCtx::new(13, 1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..30 {
            let n = rng.gen_range(2..=5);
            let a = FieldMatrix::random(&f13, &mut rng, n);
            let u: Vec<FieldElem> = (0..n).map(|_| f13.random(&mut rng)).collect();
            let v: Vec<FieldElem> = (0..n).map(|_| f13.random(&mut rng)).collect();
            let i = rng.gen_range(0..n);
            let mut a_sum = a.clone();
            let mut a_u = a.clone();
            let mut a_v = a.clone();
            for j in 0..n {
                a_sum.set(i, j, f13.add(&u[j], &v[j]));
                a_u.set(i, j, u[j].clone());
                a_v.set(i, j, v[j].clone());
            }
            assert_eq!(
                hc_dp(&f13, &a_sum),
                f13.add(&hc_dp(&f13, &a_u), &hc_dp(&f13, &a_v))
            );
        }
    }

    #[test]
    fn hc_at_most_per_for_nonnegative() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        for _ in 0..20 {
            let n = rng.gen_range(1..=6);
            let a = Matrix::from_fn(n, |_, _| BigInt::from(rng.gen_range(0i64..5)));
            assert!(hc_dp(&IntRing, &a) <= per_ryser(&IntRing, &a));
        }
    }
}
