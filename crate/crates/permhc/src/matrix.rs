//! Square matrices over an arbitrary element type, stored row-major.

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use num_bigint::BigInt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

pub type FieldMatrix = Matrix<FieldElem>;
pub type IntMatrix = Matrix<BigInt>;

impl<T: Clone> Matrix<T> {
    pub fn from_vec(n: usize, data: Vec<T>) -> Result<Matrix<T>> {
        if data.len() != n * n {
            return Err(Error::Dimension(format!(
                "expected {} entries for an {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(Matrix { n, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Matrix<T>> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "row {} has {} entries, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
        }
        Ok(Matrix { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Matrix<T> {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { n: self.n, data: self.data.iter().map(|t| f(t)).collect() }
    }

    /// Minor with row `i` and column `j` deleted.
    pub fn minor(&self, i: usize, j: usize) -> Matrix<T> {
        let n = self.n;
        let mut data = Vec::with_capacity((n - 1) * (n - 1));
        for r in 0..n {
            if r == i {
                continue;
            }
            for c in 0..n {
                if c == j {
                    continue;
                }
                data.push(self.get(r, c).clone());
            }
        }
        Matrix { n: n - 1, data }
    }

    /// Submatrix keeping rows whose bit is clear in `drop_rows` and columns
    /// whose bit is clear in `drop_cols` (bit `i` = index `i`).
    pub fn complement_submatrix(&self, drop_rows: u32, drop_cols: u32) -> Matrix<T> {
        let n = self.n;
        let keep_r: Vec<usize> = (0..n).filter(|i| drop_rows & (1 << i) == 0).collect();
        let keep_c: Vec<usize> = (0..n).filter(|j| drop_cols & (1 << j) == 0).collect();
        let mut data = Vec::with_capacity(keep_r.len() * keep_c.len());
        for &r in &keep_r {
            for &c in &keep_c {
                data.push(self.get(r, c).clone());
            }
        }
        Matrix { n: keep_r.len(), data }
    }

    /// Submatrix with rows in `rows` (bit set = kept) and columns in `cols`,
    /// both in increasing index order.
    pub fn select_submatrix(&self, rows: u32, cols: u32) -> Matrix<T> {
        let n = self.n;
        let keep_r: Vec<usize> = (0..n).filter(|i| rows & (1 << i) != 0).collect();
        let keep_c: Vec<usize> = (0..n).filter(|j| cols & (1 << j) != 0).collect();
        let mut data = Vec::with_capacity(keep_r.len() * keep_c.len());
        for &r in &keep_r {
            for &c in &keep_c {
                data.push(self.get(r, c).clone());
            }
        }
        Matrix { n: keep_r.len(), data }
    }

    /// Simultaneous row/column relabeling: entry `(a, b)` of the result is
    /// entry `(perm[a], perm[b])` of `self`.
    pub fn relabel(&self, perm: &[usize]) -> Matrix<T> {
        assert_eq!(perm.len(), self.n);
        Matrix::from_fn(self.n, |a, b| self.get(perm[a], perm[b]).clone())
    }
}

impl FieldMatrix {
    pub fn identity(ctx: &FieldCtx, n: usize) -> FieldMatrix {
        Matrix::from_fn(n, |i, j| if i == j { ctx.one() } else { ctx.zero() })
    }

    pub fn random<R: rand::Rng>(ctx: &FieldCtx, rng: &mut R, n: usize) -> FieldMatrix {
        Matrix::from_fn(n, |_, _| ctx.random(rng))
    }

    /// Flattens row-major into a point of `F_q^(n^2)`.
    pub fn to_point(&self) -> Vec<FieldElem> {
        self.data.clone()
    }

    pub fn from_point(n: usize, point: &[FieldElem]) -> Result<FieldMatrix> {
        Matrix::from_vec(n, point.to_vec())
    }
}
