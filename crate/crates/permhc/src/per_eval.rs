//! The r-order evaluation data structure for the permanent at a fixed base
//! matrix `A`.
//!
//! Build time precomputes `g_{S,T} = per(A with rows S and columns T
//! removed)` for all `|S| = |T| < r` via Ryser's formula. A query receives a
//! series matrix `F(t)` with `F(0) = A`, writes `B = F - A` (no constant
//! term) and fills the permanent DP `f(S,T) = per(B_{S,T})` layer by layer;
//! the answer is `sum f(S,T) g_{S,T}`, exact mod `t^r` because every entry of
//! `B` is divisible by `t`.

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::matrix::FieldMatrix;
use crate::oracles::per_ryser;
use crate::series::TruncSeries;
use std::collections::HashMap;

/// All k-bit masks of the given popcount, ascending (Gosper's hack).
pub(crate) fn masks_with_popcount(k: usize, j: usize) -> Vec<u32> {
    if j == 0 {
        return vec![0];
    }
    if j > k {
        return vec![];
    }
    let limit: u32 = 1 << k;
    let mut out = Vec::new();
    let mut mask: u32 = (1 << j) - 1;
    while mask < limit {
        out.push(mask);
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        if r >= limit {
            break;
        }
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Pivot {
    Min,
    #[allow(dead_code)]
    Max,
}

pub struct PerEvaluator {
    ctx: FieldCtx,
    k: usize,
    r: usize,
    a: FieldMatrix,
    a_point: Vec<FieldElem>,
    /// `(S, T) -> per(A_{[k] minus S, [k] minus T})`, keys packed as bit masks.
    g_table: HashMap<(u32, u32), FieldElem>,
}

impl PerEvaluator {
    pub fn build(ctx: &FieldCtx, a: &FieldMatrix, r: usize) -> Result<PerEvaluator> {
        let k = a.n();
        if r < 1 || r > k {
            return Err(Error::BadOrder { r, k });
        }
        assert!(k < 32, "subset masks are u32");
        let mut g_table = HashMap::new();
        for j in 0..r {
            for s in masks_with_popcount(k, j) {
                for t in masks_with_popcount(k, j) {
                    let minor = a.complement_submatrix(s, t);
                    g_table.insert((s, t), per_ryser(ctx, &minor));
                }
            }
        }
        Ok(PerEvaluator {
            ctx: ctx.clone(),
            k,
            r,
            a: a.clone(),
            a_point: a.to_point(),
            g_table,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> usize {
        self.r
    }

    pub fn base_matrix(&self) -> &FieldMatrix {
        &self.a
    }

    pub fn base_point(&self) -> &[FieldElem] {
        &self.a_point
    }

    pub fn table_len(&self) -> usize {
        self.g_table.len()
    }

    pub fn table_entry(&self, s: u32, t: u32) -> Option<&FieldElem> {
        self.g_table.get(&(s, t))
    }

    /// Closed form for the number of series multiplications a query performs:
    /// the DP does `C(k,j)^2 * j` products per layer `0 < j < r` plus one
    /// scalar product per table entry in the final combination.
    pub fn expected_query_mults(k: usize, r: usize) -> u64 {
        let binom = |n: u64, m: u64| -> u64 {
            if m > n {
                return 0;
            }
            let mut v = 1u64;
            for i in 0..m {
                v = v * (n - i) / (i + 1);
            }
            v
        };
        let mut total = 0u64;
        for j in 0..r as u64 {
            let c = binom(k as u64, j);
            total += c * c * j + c * c;
        }
        total
    }

    /// `per(F(t)) mod t^r` for `F(0) = A`. Returns the value together with
    /// the number of series multiplications performed.
    pub fn query(&self, f: &[TruncSeries]) -> Result<(TruncSeries, u64)> {
        self.query_impl(f, Pivot::Min)
    }

    pub(crate) fn query_impl(
        &self,
        f: &[TruncSeries],
        pivot: Pivot,
    ) -> Result<(TruncSeries, u64)> {
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
        let mut mults = 0u64;
        // B = F - A, entries divisible by t.
        let b: Vec<TruncSeries> = f
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mut d = s.clone();
                d.coeffs[0] = ctx.sub(&d.coeffs[0], &self.a_point[i]);
                d
            })
            .collect();
        let b_at = |i: usize, j: usize| -> &TruncSeries { &b[i * k + j] };

        let mut result = TruncSeries::zero(ctx, r);
        // Layer 0.
        let g00 = &self.g_table[&(0, 0)];
        result.coeffs[0] = g00.clone();
        mults += 1; // the (empty, empty) scalar combine

        let mut prev: HashMap<(u32, u32), TruncSeries> = HashMap::new();
        prev.insert((0, 0), TruncSeries::constant(ctx, ctx.one(), r));
        for j in 1..r {
            let mut cur: HashMap<(u32, u32), TruncSeries> = HashMap::new();
            for &s_mask in &masks_with_popcount(k, j) {
                let s_row = match pivot {
                    Pivot::Min => s_mask.trailing_zeros() as usize,
                    Pivot::Max => 31 - s_mask.leading_zeros() as usize,
                };
                let s_rest = s_mask & !(1 << s_row);
                for &t_mask in &masks_with_popcount(k, j) {
                    let mut acc = TruncSeries::zero(ctx, r);
                    let mut t_iter = t_mask;
                    while t_iter != 0 {
                        let t_col = t_iter.trailing_zeros() as usize;
                        t_iter &= t_iter - 1;
                        let sub = &prev[&(s_rest, t_mask & !(1 << t_col))];
                        let prod = b_at(s_row, t_col).mul(ctx, sub)?;
                        mults += 1;
                        acc = acc.add(ctx, &prod)?;
                    }
                    if let Some(g) = self.g_table.get(&(s_mask, t_mask)) {
                        let scaled = acc.scale(ctx, g);
                        mults += 1;
                        result = result.add(ctx, &scaled)?;
                    }
                    cur.insert((s_mask, t_mask), acc);
                }
            }
            prev = cur;
        }
        Ok((result, mults))
    }
}
