//! Self-reduction: rewrite an n-by-n permanent or Hamiltonian-cycle count as
//! a weighted sum of k-by-k instances of the same quantity, produced as a
//! stream.
//!
//! Strategies register by name. The `laplace` strategy expands the first row
//! (permanent) or contracts vertex 1 into its successor (Hamiltonian
//! cycles), one size per step, until the target size is reached; it is exact
//! over any field but emits up to `n!/k!` (respectively `(n-1)!/(k-1)!`)
//! instances. Zero branches are pruned, so the emitted count depends on the
//! matrix but never exceeds those bounds.

use crate::error::{Error, Result};
use crate::evaluator::CountMode;
use crate::field::{FieldCtx, FieldElem};
use crate::matrix::{FieldMatrix, Matrix};

/// One reduced instance: a weight and a k-by-k matrix over the same field;
/// the weighted sum of the target quantity over the stream equals the
/// original count.
#[derive(Clone, Debug)]
pub struct ReductionInstance {
    pub weight: FieldElem,
    pub matrix: FieldMatrix,
}

pub trait ReductionStrategy: Sync {
    fn name(&self) -> &'static str;

    /// Worst-case instance count, used by cost models.
    fn instance_bound(&self, n: usize, k: usize, mode: CountMode) -> f64;

    fn stream<'a>(
        &self,
        ctx: &'a FieldCtx,
        a: &'a FieldMatrix,
        k: usize,
        mode: CountMode,
    ) -> Result<Box<dyn Iterator<Item = ReductionInstance> + Send + 'a>>;
}

pub struct LaplaceStrategy;

/// Expansion frame: a matrix of the current size plus the accumulated weight.
struct LaplaceStream<'a> {
    ctx: &'a FieldCtx,
    k: usize,
    mode: CountMode,
    stack: Vec<(FieldMatrix, FieldElem)>,
}

impl Iterator for LaplaceStream<'_> {
    type Item = ReductionInstance;

    fn next(&mut self) -> Option<ReductionInstance> {
        let ctx = self.ctx;
        while let Some((m, w)) = self.stack.pop() {
            let n = m.n();
            if n == self.k {
                return Some(ReductionInstance { weight: w, matrix: m });
            }
            match self.mode {
                CountMode::Per => {
                    // per(A) = sum_j A[0][j] * per(minor(0, j)). Push children
                    // in descending j so they pop in ascending order.
                    for j in (0..n).rev() {
                        let e = m.get(0, j);
                        if ctx.is_zero(e) {
                            continue;
                        }
                        self.stack.push((m.minor(0, j), ctx.mul(&w, e)));
                    }
                }
                CountMode::Hc => {
                    // Contract vertex 0 into its cycle successor j: the
                    // (n-1)-sized child keeps hc-form with column j folded to
                    // A[i][0] * A[0][j].
                    for j in (1..n).rev() {
                        let out = m.get(0, j);
                        if ctx.is_zero(out) {
                            continue;
                        }
                        let child = Matrix::from_fn(n - 1, |x, y| {
                            if y == j - 1 {
                                ctx.mul(m.get(x + 1, 0), out)
                            } else {
                                m.get(x + 1, y + 1).clone()
                            }
                        });
                        self.stack.push((child, w.clone()));
                    }
                }
            }
        }
        None
    }
}

impl ReductionStrategy for LaplaceStrategy {
    fn name(&self) -> &'static str {
        "laplace"
    }

    fn instance_bound(&self, n: usize, k: usize, mode: CountMode) -> f64 {
        let (hi, lo) = match mode {
            CountMode::Per => (n, k),
            CountMode::Hc => (n.saturating_sub(1), k.saturating_sub(1)),
        };
        let mut bound = 1f64;
        for v in lo + 1..=hi {
            bound *= v as f64;
        }
        bound
    }

    fn stream<'a>(
        &self,
        ctx: &'a FieldCtx,
        a: &'a FieldMatrix,
        k: usize,
        mode: CountMode,
    ) -> Result<Box<dyn Iterator<Item = ReductionInstance> + Send + 'a>> {
        let n = a.n();
        if k < 1 || k > n {
            return Err(Error::Dimension(format!("target size {k} out of range 1..={n}")));
        }
        if k < n && ctx.q() < (k * k + 1) as u64 {
            return Err(Error::FieldTooSmall { q: ctx.q(), need: (k * k + 1) as u64 });
        }
        Ok(Box::new(LaplaceStream {
            ctx,
            k,
            mode,
            stack: vec![(a.clone(), ctx.one())],
        }))
    }
}

static LAPLACE: LaplaceStrategy = LaplaceStrategy;

/// Looks up a registered strategy. The low-instance-count reduction meeting
/// the `2^(n-k) poly(n)` bound lives in prior work whose construction is not
/// reproduced here, so `faithful` is currently unregistered and resolves to
/// nothing.
pub fn strategy(name: &str) -> Option<&'static dyn ReductionStrategy> {
    match name {
        "laplace" => Some(&LAPLACE),
        _ => None,
    }
}

/// `faithful` when registered, otherwise `laplace`.
pub fn default_strategy() -> &'static dyn ReductionStrategy {
    strategy("faithful").unwrap_or(&LAPLACE)
}

/// Convenience entry point over the default strategy.
pub fn reduce_instances<'a>(
    ctx: &'a FieldCtx,
    a: &'a FieldMatrix,
    k: usize,
    mode: CountMode,
) -> Result<Box<dyn Iterator<Item = ReductionInstance> + Send + 'a>> {
    default_strategy().stream(ctx, a, k, mode)
}
