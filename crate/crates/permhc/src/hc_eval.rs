//! The r-order evaluation data structure for Hamiltonian cycles.
//!
//! `hc(A)` is written as the permutation sum weighted by the spanning-tree
//! determinant `det((I - P_sigma) minor)`, and that determinant is expanded
//! by Leibniz into a second permutation `tau` with `tau(1) = 1`. The signed
//! suffix DP fills `f(S, T)`: the contribution of positions `k-s+1..k` whose
//! `tau`-values form `S` (never containing 1) and `sigma`-values form `T`,
//! with inversions of `tau` counted inside the window. Because the DP is
//! graded by suffix length, all layers that touch only base rows can be
//! precomputed; a query continues the DP through the replaced rows with
//! series arithmetic, once per replaced row set `S` with `|S| < r`.

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::matrix::FieldMatrix;
use crate::per_eval::masks_with_popcount;
use crate::ring::Ring;
use crate::series::{SeriesRing, TruncSeries};
use std::collections::HashMap;

/// One DP layer step: processes position `i` (1-indexed), consuming the
/// layer where positions `i+1..k` are assigned. For each unused
/// `sigma`-value `j` there are two `tau` choices: `tau(i) = i` with sign
/// `(-1)^inv(i, S)`, and `tau(i) = j` (only for `j != 1`) with sign
/// `(-1)^(1 + inv(j, S))`; `inv(v, S)` counts elements of `S` below `v`.
fn dp_advance<R: Ring>(
    ring: &R,
    k: usize,
    entry: &dyn Fn(usize, usize) -> R::Elem,
    layer: &HashMap<(u32, u32), R::Elem>,
    i: usize,
    mults: &mut u64,
) -> HashMap<(u32, u32), R::Elem> {
    let full: u32 = (1 << k) - 1;
    let mut next: HashMap<(u32, u32), R::Elem> = HashMap::new();
    let inv_count = |v: usize, s: u32| -> u32 { (s & ((1 << (v - 1)) - 1)).count_ones() };
    for ((s_mask, t_mask), val) in layer {
        let avail = full & !t_mask;
        let mut t_iter = avail;
        while t_iter != 0 {
            let j = t_iter.trailing_zeros() as usize + 1;
            t_iter &= t_iter - 1;
            let aij = entry(i, j);
            let step = ring.mul(&aij, val);
            *mults += 1;
            let t_new = t_mask | (1 << (j - 1));
            // tau(i) = i.
            if s_mask & (1 << (i - 1)) == 0 {
                let s_new = s_mask | (1 << (i - 1));
                let slot = next.entry((s_new, t_new)).or_insert_with(|| ring.zero());
                if inv_count(i, *s_mask) % 2 == 0 {
                    *slot = ring.add(slot, &step);
                } else {
                    *slot = ring.sub(slot, &step);
                }
            }
            // tau(i) = sigma(i) = j; value 1 is reserved for tau(1).
            if j != 1 && s_mask & (1 << (j - 1)) == 0 {
                let s_new = s_mask | (1 << (j - 1));
                let slot = next.entry((s_new, t_new)).or_insert_with(|| ring.zero());
                if (1 + inv_count(j, *s_mask)) % 2 == 0 {
                    *slot = ring.add(slot, &step);
                } else {
                    *slot = ring.sub(slot, &step);
                }
            }
        }
    }
    next
}

/// Runs the suffix DP over base rows from layer 0 down to processing
/// position `stop` (inclusive); positions `stop..k` end up assigned.
pub(crate) fn field_dp(
    ctx: &FieldCtx,
    m: &FieldMatrix,
    stop: usize,
) -> HashMap<(u32, u32), FieldElem> {
    let k = m.n();
    let mut layer: HashMap<(u32, u32), FieldElem> = HashMap::new();
    layer.insert((0, 0), ctx.one());
    let mut mults = 0u64;
    for i in (stop..=k).rev() {
        let entry = |a: usize, b: usize| m.get(a - 1, b - 1).clone();
        layer = dp_advance(ctx, k, &entry, &layer, i, &mut mults);
    }
    layer
}

/// Closes the DP with the choice of `sigma(1)`:
/// `hc = sum_j entry(1, j) * f([k] minus {1}, [k] minus {j})`.
fn close_row_one<R: Ring>(
    ring: &R,
    k: usize,
    entry: &dyn Fn(usize, usize) -> R::Elem,
    layer: &HashMap<(u32, u32), R::Elem>,
    mults: &mut u64,
) -> R::Elem {
    let full: u32 = (1 << k) - 1;
    let s_full = full & !1;
    let mut total = ring.zero();
    for j in 1..=k {
        let t_mask = full & !(1 << (j - 1));
        if let Some(f) = layer.get(&(s_full, t_mask)) {
            let term = ring.mul(&entry(1, j), f);
            *mults += 1;
            total = ring.add(&total, &term);
        }
    }
    total
}

enum RepData {
    /// `|S| = 0`: the term is the constant `hc(A)`.
    Constant(FieldElem),
    /// `|S| >= 1`: DP layer `k - |S|` over the relabeled base matrix.
    Table(HashMap<(u32, u32), FieldElem>),
}

struct RepEntry {
    /// Relabeling: new index `a` holds original index `perm[a]`.
    perm: Vec<usize>,
    sr: usize,
    data: RepData,
}

pub struct HcEvaluator {
    ctx: FieldCtx,
    k: usize,
    r: usize,
    a_point: Vec<FieldElem>,
    entries: Vec<RepEntry>,
}

impl HcEvaluator {
    /// Precomputes, for every replaced-row set `S` with `|S| < r`, the suffix
    /// DP over the base matrix relabeled so `S` occupies the first rows.
    pub fn build(ctx: &FieldCtx, a: &FieldMatrix, r: usize) -> Result<HcEvaluator> {
        let k = a.n();
        if r < 1 || r > k {
            return Err(Error::BadOrder { r, k });
        }
        assert!(k < 32, "subset masks are u32");
        let mut entries = Vec::new();
        for sr in 0..r {
            for mask in masks_with_popcount(k, sr) {
                let mut perm: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
                perm.extend((0..k).filter(|i| mask & (1 << i) == 0));
                let m = a.relabel(&perm);
                let data = if sr == 0 {
                    let layer = field_dp(ctx, &m, 2);
                    let mut mults = 0u64;
                    let entry = |x: usize, y: usize| m.get(x - 1, y - 1).clone();
                    let h0 = close_row_one(ctx, k, &entry, &layer, &mut mults);
                    RepData::Constant(h0)
                } else {
                    RepData::Table(field_dp(ctx, &m, sr + 1))
                };
                entries.push(RepEntry { perm, sr, data });
            }
        }
        Ok(HcEvaluator {
            ctx: ctx.clone(),
            k,
            r,
            a_point: a.to_point(),
            entries,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> usize {
        self.r
    }

    pub fn base_point(&self) -> &[FieldElem] {
        &self.a_point
    }

    /// The precomputed `hc(A)` (the empty replaced-row set's term).
    pub fn base_value(&self) -> &FieldElem {
        match &self.entries[0].data {
            RepData::Constant(h) => h,
            RepData::Table(_) => unreachable!("entry 0 is the empty set"),
        }
    }

    /// `hc(F(t)) mod t^r` for `F(0) = A`, with the series-multiplication
    /// count. Sums, over every replaced-row set `S` with `|S| < r`, the DP
    /// continued through the replaced rows of `B = F - A`.
    pub fn query(&self, f: &[TruncSeries]) -> Result<(TruncSeries, u64)> {
        let ctx = &self.ctx;
        let k = self.k;
        let r = self.r;
        if f.len() != k * k {
            return Err(Error::Dimension(format!(
                "query has {} series entries, expected {}",
                f.len(),
                k * k
            )));
        }
        for s in f {
            if s.order() != r {
                return Err(Error::OrderMismatch(s.order(), r));
            }
        }
        for (i, s) in f.iter().enumerate() {
            if s.constant_term() != &self.a_point[i] {
                return Err(Error::BasePointMismatch);
            }
        }
        let b: Vec<TruncSeries> = f
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mut d = s.clone();
                d.coeffs[0] = ctx.sub(&d.coeffs[0], &self.a_point[i]);
                d
            })
            .collect();
        let ring = SeriesRing::new(ctx.clone(), r);
        let mut mults = 0u64;
        let mut total = TruncSeries::zero(ctx, r);
        for entry in &self.entries {
            match &entry.data {
                RepData::Constant(h0) => {
                    total.coeffs[0] = ctx.add(&total.coeffs[0], h0);
                }
                RepData::Table(table) => {
                    let perm = &entry.perm;
                    let b_entry = |x: usize, y: usize| -> TruncSeries {
                        b[perm[x - 1] * k + perm[y - 1]].clone()
                    };
                    let mut layer: HashMap<(u32, u32), TruncSeries> = table
                        .iter()
                        .map(|(key, v)| (*key, TruncSeries::constant(ctx, v.clone(), r)))
                        .collect();
                    for i in (2..=entry.sr).rev() {
                        layer = dp_advance(&ring, k, &b_entry, &layer, i, &mut mults);
                    }
                    let term = close_row_one(&ring, k, &b_entry, &layer, &mut mults);
                    total = total.add(ctx, &term)?;
                }
            }
        }
        Ok((total, mults))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::oracles::{hc_brute, hc_dp};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    /// The defining signed sum for `f(S, T)` at suffix length `s`: enumerate
    /// bijections `sigma: {k-s+1..k} -> T` and `tau: {k-s+1..k} -> S`, weight
    /// by the entry products, the indicator brackets and `(-1)^inv(tau)`.
    fn defining_sum(
        ctx: &FieldCtx,
        m: &FieldMatrix,
        s_mask: u32,
        t_mask: u32,
    ) -> FieldElem {
        let k = m.n();
        let s_vals: Vec<usize> = (1..=k).filter(|v| s_mask & (1 << (v - 1)) != 0).collect();
        let t_vals: Vec<usize> = (1..=k).filter(|v| t_mask & (1 << (v - 1)) != 0).collect();
        let s = s_vals.len();
        assert_eq!(s, t_vals.len());
        let positions: Vec<usize> = (k - s + 1..=k).collect();
        let mut total = ctx.zero();
        let mut sigma_perm: Vec<usize> = (0..s).collect();
        loop {
            let mut tau_perm: Vec<usize> = (0..s).collect();
            loop {
                let mut weight = ctx.one();
                let mut ok = true;
                let mut inv = 0usize;
                for a in 0..s {
                    for b in a + 1..s {
                        if s_vals[tau_perm[a]] > s_vals[tau_perm[b]] {
                            inv += 1;
                        }
                    }
                }
                for (idx, &pos) in positions.iter().enumerate() {
                    let sig = t_vals[sigma_perm[idx]];
                    let tau = s_vals[tau_perm[idx]];
                    weight = ctx.mul(&weight, m.get(pos - 1, sig - 1));
                    let bracket = i64::from(pos == tau) - i64::from(sig == tau);
                    if bracket == 0 {
                        ok = false;
                        break;
                    }
                    if bracket < 0 {
                        weight = ctx.neg(&weight);
                    }
                }
                if ok {
                    if inv % 2 == 1 {
                        weight = ctx.neg(&weight);
                    }
                    total = ctx.add(&total, &weight);
                }
                if !next_perm(&mut tau_perm) {
                    break;
                }
            }
            if !next_perm(&mut sigma_perm) {
                break;
            }
        }
        total
    }

    fn next_perm(p: &mut [usize]) -> bool {
        if p.len() < 2 {
            return false;
        }
        let mut i = p.len() - 1;
        while i > 0 && p[i - 1] >= p[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = p.len() - 1;
        while p[j] <= p[i - 1] {
            j -= 1;
        }
        p.swap(i - 1, j);
        p[i..].reverse();
        true
    }

    fn series_matrix(ctx: &FieldCtx, r: usize, layers: &[&FieldMatrix]) -> Vec<TruncSeries> {
        let k = layers[0].n();
        let mut out = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                let mut s = TruncSeries::zero(ctx, r);
                for (d, m) in layers.iter().enumerate() {
                    if d < r {
                        s.coeffs[d] = m.get(i, j).clone();
                    }
                }
                out.push(s);
            }
        }
        out
    }

    #[test]
    fn dp_layers_match_defining_sum() {
        let f19 = FieldCtx::new(19, 1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(60);
        for k in 2..=5usize {
            let m = FieldMatrix::random(&f19, &mut rng, k);
            for s in 1..k {
                let layer = field_dp(&f19, &m, k - s + 1);
                for s_mask in masks_with_popcount(k, s) {
                    if s_mask & 1 != 0 {
                        continue; // tau never takes the value 1
                    }
                    for t_mask in masks_with_popcount(k, s) {
                        let got = layer
                            .get(&(s_mask, t_mask))
                            .cloned()
                            .unwrap_or_else(|| f19.zero());
                        let expect = defining_sum(&f19, &m, s_mask, t_mask);
                        assert_eq!(got, expect, "k={k} s={s} S={s_mask:b} T={t_mask:b}");
                    }
                }
            }
        }
    }

    #[test]
    fn base_value_equals_hc_oracle() {
        let f19 = FieldCtx::new(19, 1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(61);
        for k in 1..=6usize {
            for _ in 0..10 {
                let a = FieldMatrix::random(&f19, &mut rng, k);
                let ev = HcEvaluator::build(&f19, &a, 1).unwrap();
                assert_eq!(*ev.base_value(), hc_dp(&f19, &a), "k={k}");
            }
        }
    }

    #[test]
    fn complete_digraph_k3() {
        let f7 = FieldCtx::new(7, 1).unwrap();
        let ones = Matrix::from_fn(3, |_, _| f7.one());
        let ev = HcEvaluator::build(&f7, &ones, 1).unwrap();
        assert_eq!(*ev.base_value(), f7.from_u64(2));
    }

    #[test]
    fn identity_has_no_hamiltonian_cycle() {
        let f7 = FieldCtx::new(7, 1).unwrap();
        for k in 2..=5 {
            let id = FieldMatrix::identity(&f7, k);
            let ev = HcEvaluator::build(&f7, &id, 1).unwrap();
            assert_eq!(*ev.base_value(), f7.zero());
        }
    }

    #[test]
    fn query_r1_is_constant_hc() {
        let f19 = FieldCtx::new(19, 1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(62);
        let a = FieldMatrix::random(&f19, &mut rng, 4);
        let b = FieldMatrix::random(&f19, &mut rng, 4);
        let ev = HcEvaluator::build(&f19, &a, 1).unwrap();
        let f = series_matrix(&f19, 1, &[&a, &b]);
        let (out, _) = ev.query(&f).unwrap();
        assert_eq!(out.coeffs()[0], hc_dp(&f19, &a));
    }

    #[test]
    fn k2_r2_antidiagonal_example() {
        // A = antidiagonal ones, B = t*I: hc(A + tB) = 1 exactly.
        let f7 = FieldCtx::new(7, 1).unwrap();
        let a = Matrix::from_fn(2, |i, j| if i != j { f7.one() } else { f7.zero() });
        let ident = FieldMatrix::identity(&f7, 2);
        let ev = HcEvaluator::build(&f7, &a, 2).unwrap();
        let f = series_matrix(&f7, 2, &[&a, &ident]);
        let (out, _) = ev.query(&f).unwrap();
        assert_eq!(out.coeffs(), &[f7.one(), f7.zero()]);
    }

    #[test]
    fn query_matches_series_brute_force() {
        let f19 = FieldCtx::new(19, 1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(63);
        for trial in 0..200 {
            let k = rng.gen_range(1..=4usize);
            let r = rng.gen_range(1..=k.min(3));
            let a = FieldMatrix::random(&f19, &mut rng, k);
            let b = FieldMatrix::random(&f19, &mut rng, k);
            let c = FieldMatrix::random(&f19, &mut rng, k);
            let f = series_matrix(&f19, r, &[&a, &b, &c]);
            let ev = HcEvaluator::build(&f19, &a, r).unwrap();
            let (got, _) = ev.query(&f).unwrap();
            let ring = SeriesRing::new(f19.clone(), r);
            let fm = Matrix::from_vec(k, f.clone()).unwrap();
            let expect = hc_brute(&ring, &fm, 10).unwrap();
            assert_eq!(got, expect, "trial {trial} k={k} r={r}");
        }
    }

    #[test]
    fn all_replaced_row_shapes_k4() {
        // Exhaustive over r (hence over every |S| < r shape) at k = 4.
        let f19 = FieldCtx::new(19, 1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(64);
        for r in 1..=4usize {
            for _ in 0..20 {
                let a = FieldMatrix::random(&f19, &mut rng, 4);
                let b = FieldMatrix::random(&f19, &mut rng, 4);
                let f = series_matrix(&f19, r, &[&a, &b]);
                let ev = HcEvaluator::build(&f19, &a, r).unwrap();
                let (got, _) = ev.query(&f).unwrap();
                let ring = SeriesRing::new(f19.clone(), r);
                let fm = Matrix::from_vec(4, f.clone()).unwrap();
                let expect = hc_brute(&ring, &fm, 10).unwrap();
                assert_eq!(got, expect, "r={r}");
            }
        }
    }

    #[test]
    fn relabeling_invariance() {
        let f19 = FieldCtx::new(19, 1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(65);
        for _ in 0..50 {
            let k = rng.gen_range(2..=6usize);
            let a = FieldMatrix::random(&f19, &mut rng, k);
            let mut perm: Vec<usize> = (0..k).collect();
            for i in (1..k).rev() {
                let j = rng.gen_range(0..=i);
                perm.swap(i, j);
            }
            let relabeled = a.relabel(&perm);
            assert_eq!(hc_dp(&f19, &a), hc_dp(&f19, &relabeled));
        }
    }

    #[test]
    fn mismatch_errors() {
        let f19 = FieldCtx::new(19, 1).unwrap();
        let a = FieldMatrix::identity(&f19, 3);
        let ev = HcEvaluator::build(&f19, &a, 2).unwrap();
        let wrong = Matrix::from_fn(3, |_, _| f19.from_u64(2));
        let f = series_matrix(&f19, 2, &[&wrong]);
        assert!(matches!(ev.query(&f), Err(Error::BasePointMismatch)));
        let short = series_matrix(&f19, 1, &[&a]);
        assert!(matches!(ev.query(&short), Err(Error::OrderMismatch(1, 2))));
    }
}
