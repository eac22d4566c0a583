//! Dense generalized eigendecomposition of small pencils by the QZ algorithm.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::lapack_wrap::generalized_eig;
use crate::{Error, Result};

/// Hard cap on the pencil order accepted by [`small_generalized_eig`].
pub const MAX_REDUCED_DIM: usize = 2000;

/// Relative threshold for declaring `λ = α/β` infinite.
pub const TOL_INF: f64 = 1e-12;

/// One generalized eigenvalue, classified finite or infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PencilEigenvalue {
    Finite(Complex64),
    Infinite,
}

impl PencilEigenvalue {
    pub fn finite_value(&self) -> Option<Complex64> {
        match self {
            PencilEigenvalue::Finite(v) => Some(*v),
            PencilEigenvalue::Infinite => None,
        }
    }
}

/// Eigenvalues of a pencil `(A, E)` with matching left and right eigenvector
/// columns.
///
/// For every finite eigenvalue whose eigentriple is not near-defective, the
/// vectors are rescaled so that `w^H E v = 1` (the scale is absorbed into the
/// right vector).
pub struct SmallEigenDecomposition {
    pub eigenvalues: Vec<PencilEigenvalue>,
    pub right_vectors: DMatrix<Complex64>,
    pub left_vectors: DMatrix<Complex64>,
    pub pencil_dim: usize,
}

impl SmallEigenDecomposition {
    /// Finite eigentriples `(λ, v, w)` in storage order.
    pub fn finite_triples(&self) -> Vec<(Complex64, DVector<Complex64>, DVector<Complex64>)> {
        self.eigenvalues
            .iter()
            .enumerate()
            .filter_map(|(j, ev)| {
                ev.finite_value().map(|lambda| {
                    (
                        lambda,
                        DVector::from(self.right_vectors.column(j).clone_owned()),
                        DVector::from(self.left_vectors.column(j).clone_owned()),
                    )
                })
            })
            .collect()
    }

    pub fn finite_count(&self) -> usize {
        self.eigenvalues
            .iter()
            .filter(|e| matches!(e, PencilEigenvalue::Finite(_)))
            .count()
    }
}

fn dense_norm_one(m: &DMatrix<Complex64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// All eigenvalues of the dense pencil `(A, E)` with left and right
/// eigenvectors, finite/infinite classification, and `w^H E v = 1`
/// normalization where attainable.
pub fn small_generalized_eig(
    a: &DMatrix<Complex64>,
    e: &DMatrix<Complex64>,
) -> Result<SmallEigenDecomposition> {
    small_generalized_eig_with_limit(a, e, MAX_REDUCED_DIM)
}

/// [`small_generalized_eig`] with an explicit size cap.
pub fn small_generalized_eig_with_limit(
    a: &DMatrix<Complex64>,
    e: &DMatrix<Complex64>,
    limit: usize,
) -> Result<SmallEigenDecomposition> {
    let d = a.nrows();
    if d > limit {
        return Err(Error::TooLarge { dim: d, limit });
    }
    if a.ncols() != d || e.nrows() != d || e.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "pencil blocks must be square and equal: A is {}x{}, E is {}x{}",
            a.nrows(),
            a.ncols(),
            e.nrows(),
            e.ncols()
        )));
    }
    let raw = generalized_eig(a, e)?;
    let mut eigenvalues = Vec::with_capacity(d);
    let mut right = raw.right;
    let left = raw.left;
    let e_norm_one = dense_norm_one(e);
    for j in 0..d {
        let alpha = raw.alpha[j];
        let beta = raw.beta[j];
        let mag = alpha.norm() + beta.norm();
        if mag == 0.0 {
            // an indeterminate alpha/beta pair means det(A - sE) vanished
            // along the deflation: the pencil is singular
            return Err(Error::SingularPencil);
        }
        if beta.norm() <= TOL_INF * mag {
            eigenvalues.push(PencilEigenvalue::Infinite);
            continue;
        }
        let lambda = alpha / beta;
        // normalize w^H E v = 1 when the triple is far enough from defective;
        // zggev returns unit-norm vectors, so the threshold only needs ||E||_1
        let v = right.column(j).clone_owned();
        let w = left.column(j).clone_owned();
        let c = w.dotc(&(e * &v));
        if c.norm() > 1e-12 * e_norm_one.max(f64::MIN_POSITIVE) {
            let scaled = v / c;
            right.set_column(j, &scaled);
        }
        eigenvalues.push(PencilEigenvalue::Finite(lambda));
    }
    Ok(SmallEigenDecomposition {
        eigenvalues,
        right_vectors: right,
        left_vectors: left,
        pencil_dim: d,
    })
}
