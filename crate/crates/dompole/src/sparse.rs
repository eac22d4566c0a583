//! Compressed-sparse-column storage for the pencil matrices `A` and `E`.
//!
//! The solver only needs a handful of sparse operations: assembly from
//! triplets, matrix-vector and adjoint matrix-vector products, products with
//! dense blocks, the shifted combination `A - μE`, and conversion to dense or
//! to the sparse factorization backend. Entries are stored column-sorted with
//! duplicates summed at assembly.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Sparse matrix in compressed-sparse-column form over `Complex64`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseMatrix {
    /// Assemble from `(row, col, value)` triplets. Duplicate coordinates are
    /// summed; explicitly stored zeros are kept.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, Complex64)],
    ) -> Self {
        let mut per_col: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); ncols];
        for &(i, j, v) in triplets {
            assert!(i < nrows && j < ncols, "triplet ({i}, {j}) out of bounds");
            per_col[j].push((i, v));
        }
        let mut col_ptr = Vec::with_capacity(ncols + 1);
        let mut row_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        col_ptr.push(0);
        for col in &mut per_col {
            col.sort_by_key(|&(i, _)| i);
            let mut k = 0;
            while k < col.len() {
                let (i, mut v) = col[k];
                let mut l = k + 1;
                while l < col.len() && col[l].0 == i {
                    v += col[l].1;
                    l += 1;
                }
                row_idx.push(i);
                values.push(v);
                k = l;
            }
            col_ptr.push(row_idx.len());
        }
        SparseMatrix {
            nrows,
            ncols,
            col_ptr,
            row_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        let triplets: Vec<_> = (0..n).map(|i| (i, i, Complex64::new(1.0, 0.0))).collect();
        Self::from_triplets(n, n, &triplets)
    }

    pub fn from_dense(m: &DMatrix<Complex64>) -> Self {
        let mut triplets = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v != Complex64::new(0.0, 0.0) {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), &triplets)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored entries in column-major order as `(row, col, value)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.ncols).flat_map(move |j| {
            (self.col_ptr[j]..self.col_ptr[j + 1]).map(move |k| (self.row_idx[k], j, self.values[k]))
        })
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.ncols)
            .map(|j| {
                self.values[self.col_ptr[j]..self.col_ptr[j + 1]]
                    .iter()
                    .map(|v| v.norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// `y = self * x`.
    pub fn mul_vec(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = DVector::zeros(self.nrows);
        for j in 0..self.ncols {
            let xj = x[j];
            if xj == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                y[self.row_idx[k]] += self.values[k] * xj;
            }
        }
        y
    }

    /// `y = self^H * x` (conjugate transpose action).
    pub fn mul_vec_adjoint(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        assert_eq!(x.len(), self.nrows);
        let mut y = DVector::zeros(self.ncols);
        for j in 0..self.ncols {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                acc += self.values[k].conj() * x[self.row_idx[k]];
            }
            y[j] = acc;
        }
        y
    }

    /// `Y = self * X` with dense `X`.
    pub fn mul_dense(&self, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        assert_eq!(x.nrows(), self.ncols);
        let mut y = DMatrix::zeros(self.nrows, x.ncols());
        for c in 0..x.ncols() {
            for j in 0..self.ncols {
                let xj = x[(j, c)];
                if xj == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                    y[(self.row_idx[k], c)] += self.values[k] * xj;
                }
            }
        }
        y
    }

    /// `Y = self^H * X` with dense `X`.
    pub fn mul_dense_adjoint(&self, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        assert_eq!(x.nrows(), self.nrows);
        let mut y = DMatrix::zeros(self.ncols, x.ncols());
        for c in 0..x.ncols() {
            for j in 0..self.ncols {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                    acc += self.values[k].conj() * x[(self.row_idx[k], c)];
                }
                y[(j, c)] = acc;
            }
        }
        y
    }

    /// The shifted combination `self - μ * other` with matching sparsity union.
    pub fn sub_scaled(&self, mu: Complex64, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.nrows, other.nrows);
        assert_eq!(self.ncols, other.ncols);
        let mut triplets = Vec::with_capacity(self.nnz() + other.nnz());
        triplets.extend(self.iter());
        triplets.extend(other.iter().map(|(i, j, v)| (i, j, -mu * v)));
        SparseMatrix::from_triplets(self.nrows, self.ncols, &triplets)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.iter() {
            m[(i, j)] += v;
        }
        m
    }
}
