//! Dense matrices over a generic [`Scalar`], with the rank-revealing
//! elimination primitives the rest of the crate is built on.
//!
//! Pivot decisions use `tol * (largest entry magnitude)` as the threshold in
//! the float backend; the exact backend decides rank exactly.

use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Debug)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix of integers, mostly for tests and fixtures.
    pub fn from_ints(rows: Vec<Vec<i64>>) -> Self {
        Self::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(S::from_int).collect())
                .collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }
    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[S]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn to_row_vecs(&self) -> Vec<Vec<S>> {
        self.rows_iter().map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Conjugate transpose.
    pub fn conj_t(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = S::zero();
            for k in 0..self.cols {
                acc = acc.add(&self[(i, k)].mul(&other[(k, j)]));
            }
            acc
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].add(&other[(i, j)]))
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].sub(&other[(i, j)]))
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].mul(c))
    }

    /// Horizontal concatenation [self | other].
    pub fn hcat(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    /// Vertical concatenation [self; other].
    pub fn vcat(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Largest entry magnitude (approximate for the exact backend).
    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|x| x.abs_sq())
            .fold(0.0f64, f64::max)
            .sqrt()
    }

    /// Max entrywise deviation from `other`.
    pub fn max_dev(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.data.iter().all(|x| x.is_zero(tol))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// In-place reduced row-echelon form with pivot normalization.
    /// Returns the pivot columns; the rank is their count. Pivot entries are
    /// snapped to exact 1 and cleared columns to exact 0.
    pub fn rref(&mut self, tol: f64) -> Vec<usize> {
        let scale = self.max_abs();
        let thresh = if S::EXACT { 0.0 } else { tol * scale.max(1e-300) };
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            // best pivot in this column at or below `row`
            let mut best = row;
            let mut best_mag = self[(row, col)].abs_sq();
            for i in row + 1..self.rows {
                let m = self[(i, col)].abs_sq();
                if m > best_mag {
                    best = i;
                    best_mag = m;
                }
            }
            if self[(best, col)].is_zero(thresh) {
                continue;
            }
            self.swap_rows(row, best);
            let inv = self[(row, col)].inv().expect("nonzero pivot");
            for j in col..self.cols {
                self[(row, j)] = self[(row, j)].mul(&inv);
            }
            self[(row, col)] = S::one();
            for i in 0..self.rows {
                if i == row {
                    continue;
                }
                let factor = self[(i, col)].clone();
                if factor.is_zero(0.0) {
                    continue;
                }
                for j in col..self.cols {
                    let sub = factor.mul(&self[(row, j)]);
                    self[(i, j)] = self[(i, j)].sub(&sub);
                }
                self[(i, col)] = S::zero();
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self, tol: f64) -> usize {
        let mut m = self.clone();
        m.rref(tol).len()
    }

    /// Keeps only the first `k` rows.
    pub fn truncate_rows(&mut self, k: usize) {
        assert!(k <= self.rows);
        self.data.truncate(k * self.cols);
        self.rows = k;
    }

    /// Basis (as rows) of `{x : M x = 0}` with `x` a column of length `ncols`.
    pub fn null_space(&self, tol: f64) -> Mat<S> {
        let mut m = self.clone();
        let pivots = m.rref(tol);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![S::zero(); self.cols];
            v[f] = S::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = m[(r, f)].neg();
            }
            basis.push(v);
        }
        if basis.is_empty() {
            Mat {
                rows: 0,
                cols: self.cols,
                data: Vec::new(),
            }
        } else {
            Mat::from_rows(basis)
        }
    }

    /// Solves `self * x = b` (square, invertible) by elimination on [A | b].
    pub fn solve(&self, b: &Mat<S>, tol: f64) -> Option<Mat<S>> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(b.rows, self.rows);
        let mut aug = self.hcat(b);
        let pivots = aug.rref(tol);
        if pivots.len() != self.cols || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        Some(Mat::from_fn(self.cols, b.cols, |i, j| {
            aug[(i, self.cols + j)].clone()
        }))
    }

    /// Inverse of a square matrix, if invertible at this tolerance.
    pub fn inverse(&self, tol: f64) -> Option<Mat<S>> {
        self.solve(&Mat::identity(self.rows), tol)
    }

    /// Least-squares solution of `self * x = b` via the normal equations.
    /// Requires full column rank.
    pub fn solve_lsq(&self, b: &Mat<S>, tol: f64) -> Option<Mat<S>> {
        let ah = self.conj_t();
        ah.mul(self).solve(&ah.mul(b), tol)
    }
}

impl<S> std::ops::Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}
