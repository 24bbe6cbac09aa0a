//! Common interface over the r-order evaluation data structures, plus the
//! memoizing per-point cache the reveal step draws from.

use crate::error::Result;
use crate::field::{FieldCtx, FieldElem};
use crate::hc_eval::HcEvaluator;
use crate::kakeya::KakeyaSet;
use crate::matrix::FieldMatrix;
use crate::per_eval::PerEvaluator;
use crate::series::TruncSeries;
use dashmap::DashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// A data structure answering `P(f(t)) mod t^r` for curves `f` anchored at
/// its base point. Queries return the value and a series-multiplication
/// count.
pub trait OrderEvaluator: Send + Sync {
    fn k(&self) -> usize;
    fn order(&self) -> usize;
    fn base_point(&self) -> &[FieldElem];
    fn query(&self, f: &[TruncSeries]) -> Result<(TruncSeries, u64)>;
}

impl OrderEvaluator for PerEvaluator {
    fn k(&self) -> usize {
        PerEvaluator::k(self)
    }

    fn order(&self) -> usize {
        PerEvaluator::order(self)
    }

    fn base_point(&self) -> &[FieldElem] {
        PerEvaluator::base_point(self)
    }

    fn query(&self, f: &[TruncSeries]) -> Result<(TruncSeries, u64)> {
        PerEvaluator::query(self, f)
    }
}

impl OrderEvaluator for HcEvaluator {
    fn k(&self) -> usize {
        HcEvaluator::k(self)
    }

    fn order(&self) -> usize {
        HcEvaluator::order(self)
    }

    fn base_point(&self) -> &[FieldElem] {
        HcEvaluator::base_point(self)
    }

    fn query(&self, f: &[TruncSeries]) -> Result<(TruncSeries, u64)> {
        HcEvaluator::query(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMode {
    Per,
    Hc,
}

impl CountMode {
    pub fn name(self) -> &'static str {
        match self {
            CountMode::Per => "per",
            CountMode::Hc => "hc",
        }
    }
}

/// Default cap on memoized evaluators; beyond it, evaluators are built per
/// touch without being retained.
pub const DEFAULT_CACHE_CAP: usize = 1 << 21;

/// Binds a builder to a `(k, r)` shape and memoizes evaluators by Kakeya
/// point. Concurrent lookups of the same point block on a single
/// construction, so the number of builds is scheduling-independent while the
/// cache stays under its capacity.
pub struct EvaluatorFamily {
    ctx: FieldCtx,
    k: usize,
    r: usize,
    mode: CountMode,
    cache: DashMap<Vec<u64>, Arc<dyn OrderEvaluator>>,
    cap: usize,
    builds: AtomicU64,
}

impl EvaluatorFamily {
    pub fn new(ctx: &FieldCtx, k: usize, r: usize, mode: CountMode) -> EvaluatorFamily {
        EvaluatorFamily {
            ctx: ctx.clone(),
            k,
            r,
            mode,
            cache: DashMap::new(),
            cap: DEFAULT_CACHE_CAP,
            builds: AtomicU64::new(0),
        }
    }

    pub fn with_cache_cap(mut self, cap: usize) -> EvaluatorFamily {
        self.cap = cap;
        self
    }

    pub fn mode(&self) -> CountMode {
        self.mode
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> usize {
        self.r
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    /// Total evaluator constructions so far.
    pub fn builds(&self) -> u64 {
        self.builds.load(Ordering::Relaxed)
    }

    pub fn cached(&self) -> usize {
        self.cache.len()
    }

    fn construct(&self, point: &[FieldElem]) -> Result<Arc<dyn OrderEvaluator>> {
        let a = FieldMatrix::from_point(self.k, point)?;
        self.builds.fetch_add(1, Ordering::Relaxed);
        Ok(match self.mode {
            CountMode::Per => Arc::new(PerEvaluator::build(&self.ctx, &a, self.r)?),
            CountMode::Hc => Arc::new(HcEvaluator::build(&self.ctx, &a, self.r)?),
        })
    }

    /// The evaluator at a point, built on first touch.
    pub fn at_point(&self, point: &[FieldElem]) -> Result<Arc<dyn OrderEvaluator>> {
        let key: Vec<u64> = point.iter().map(|e| self.ctx.elem_index(e)).collect();
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit.clone());
        }
        if self.cache.len() >= self.cap {
            return self.construct(point);
        }
        match self.cache.entry(key) {
            dashmap::mapref::entry::Entry::Occupied(e) => Ok(e.get().clone()),
            dashmap::mapref::entry::Entry::Vacant(v) => {
                let built = self.construct(point)?;
                v.insert(built.clone());
                Ok(built)
            }
        }
    }

    /// Eagerly builds evaluators for every point of an enumerated Kakeya set
    /// (the construct-everything-up-front mode).
    pub fn build_all(&self, kakeya: &KakeyaSet) -> Result<()> {
        let Some(points) = kakeya.points() else {
            return Err(crate::error::Error::Unsupported(
                "eager evaluator construction needs an enumerated Kakeya set".into(),
            ));
        };
        for pt in points {
            let elems: Vec<FieldElem> =
                pt.iter().map(|&idx| self.ctx.elem_from_index(idx)).collect();
            self.at_point(&elems)?;
        }
        Ok(())
    }
}
