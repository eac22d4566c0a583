//! Dense and sparse linear-algebra primitives used by every higher module:
//! shifted LU factorizations with adjoint solves, a small dense generalized
//! eigensolver with left and right eigenvectors, the largest singular value,
//! and reorthogonalized basis extension.

mod basis;
mod eig;
mod factor;
mod lapack_wrap;

pub use basis::{extend_basis, OrthonormalBasis, TOL_RANK};
pub use eig::{
    small_generalized_eig, small_generalized_eig_with_limit, PencilEigenvalue,
    SmallEigenDecomposition, MAX_REDUCED_DIM, TOL_INF,
};
pub use factor::{factor_shifted, ShiftedFactorization, DENSE_SOLVE_LIMIT};

pub(crate) use lapack_wrap::DenseLu;

use crate::Result;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Largest singular value of a dense matrix; zero for empty shapes.
pub fn sigma_max(m: &DMatrix<Complex64>) -> Result<f64> {
    let s = lapack_wrap::singular_values(m)?;
    Ok(s.first().copied().unwrap_or(0.0))
}
