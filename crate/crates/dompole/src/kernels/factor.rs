//! Shifted factorizations `A - μE` with forward and adjoint solves.
//!
//! One factorization serves arbitrarily many right-hand sides, for both
//! `(A - μE) x = b` and `(A - μE)^H x = b`; this is what makes a single LU per
//! interpolation point sufficient for the whole expansion block. Small systems
//! are factored densely, larger ones through a fill-reducing sparse LU.

use std::sync::Arc;

use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::lapack_wrap::DenseLu;
use crate::counters::RunCounters;
use crate::sparse::SparseMatrix;
use crate::{Error, Result};

/// Order up to which the shifted solve uses a dense LU.
pub const DENSE_SOLVE_LIMIT: usize = 500;

enum Backend {
    Dense(DenseLu),
    Sparse(Box<faer::sparse::linalg::solvers::Lu<usize, Complex64>>),
}

/// An LU factorization of `A - μE`, immutable after construction.
pub struct ShiftedFactorization {
    shift: Complex64,
    dim: usize,
    backend: Backend,
    counters: Arc<RunCounters>,
}

/// Factor `A - μE`, recording one LU event.
///
/// Fails with [`Error::SingularShift`] when the shifted matrix is detected as
/// numerically singular, which signals that `μ` is (numerically) a pole.
pub fn factor_shifted(
    a: &SparseMatrix,
    e: &SparseMatrix,
    mu: Complex64,
    counters: &Arc<RunCounters>,
) -> Result<ShiftedFactorization> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    assert_eq!(e.nrows(), n);
    assert_eq!(e.ncols(), n);
    super::lapack_wrap::ensure_serial_backends();
    let shifted = a.sub_scaled(mu, e);
    let scale = shifted.max_abs();
    if scale == 0.0 {
        return Err(Error::SingularShift { shift: mu });
    }

    let backend = if n <= DENSE_SOLVE_LIMIT {
        let lu = DenseLu::factor(shifted.to_dense())?;
        // Pivot threshold scaled to the matrix magnitude; an exact or
        // near-exact zero pivot means μ sits on an eigenvalue.
        let tol = (n as f64) * f64::EPSILON * scale;
        if lu.zero_pivot() || lu.min_pivot() <= tol {
            return Err(Error::SingularShift { shift: mu });
        }
        Backend::Dense(lu)
    } else {
        let triplets: Vec<Triplet<usize, usize, Complex64>> = shifted
            .iter()
            .map(|(i, j, v)| Triplet::new(i, j, v))
            .collect();
        let mat = SparseColMat::<usize, Complex64>::try_new_from_triplets(n, n, &triplets)
            .map_err(|_| Error::SingularShift { shift: mu })?;
        let lu = mat
            .sp_lu()
            .map_err(|_| Error::SingularShift { shift: mu })?;
        // The sparse backend does not expose pivots, so singularity is probed
        // with one uncounted solve: a non-finite result or an amplification
        // beyond 1/(n eps) relative to the matrix scale flags the shift.
        let probe_rhs = faer::Mat::<Complex64>::from_fn(n, 1, |_, _| Complex64::new(1.0, 0.0));
        let probe = lu.solve(&probe_rhs);
        let mut amp: f64 = 0.0;
        for i in 0..n {
            let v = probe[(i, 0)].norm();
            if !v.is_finite() {
                return Err(Error::SingularShift { shift: mu });
            }
            amp = amp.max(v);
        }
        if amp * scale * (n as f64) * f64::EPSILON > 1.0 {
            return Err(Error::SingularShift { shift: mu });
        }
        Backend::Sparse(Box::new(lu))
    };

    // only successful factorizations count as LU events
    counters.record_lu();
    Ok(ShiftedFactorization {
        shift: mu,
        dim: n,
        backend,
        counters: Arc::clone(counters),
    })
}

impl ShiftedFactorization {
    pub fn shift(&self) -> Complex64 {
        self.shift
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Solve `(A - μE) X = B` column by column; records one solve per column.
    pub fn solve(&self, rhs: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        self.solve_impl(rhs, false)
    }

    /// Solve `(A - μE)^H X = B`; records one solve per column.
    pub fn solve_adjoint(&self, rhs: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        self.solve_impl(rhs, true)
    }

    fn solve_impl(&self, rhs: &DMatrix<Complex64>, adjoint: bool) -> Result<DMatrix<Complex64>> {
        assert_eq!(rhs.nrows(), self.dim);
        self.counters.record_solves(rhs.ncols() as u64);
        match &self.backend {
            Backend::Dense(lu) => lu.solve(rhs, adjoint),
            Backend::Sparse(lu) => {
                let n = self.dim;
                let k = rhs.ncols();
                if adjoint {
                    // (A - μE)^H x = b  <=>  x = conj( (A - μE)^T \ conj(b) )
                    let b = faer::Mat::<Complex64>::from_fn(n, k, |i, j| rhs[(i, j)].conj());
                    let y = lu.solve_transpose(&b);
                    Ok(DMatrix::from_fn(n, k, |i, j| y[(i, j)].conj()))
                } else {
                    let b = faer::Mat::<Complex64>::from_fn(n, k, |i, j| rhs[(i, j)]);
                    let y = lu.solve(&b);
                    Ok(DMatrix::from_fn(n, k, |i, j| y[(i, j)]))
                }
            }
        }
    }
}
