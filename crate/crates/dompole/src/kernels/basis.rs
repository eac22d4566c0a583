//! Orthonormal bases with reorthogonalized extension.
//!
//! Near convergence the new interpolation directions almost lie in the current
//! subspace, so plain Gram-Schmidt would produce badly conditioned bases. Each
//! incoming column is therefore projected out of the current basis twice
//! before normalization, and columns whose remaining norm falls under a
//! rank guard relative to their incoming norm are dropped.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Relative rank guard: a projected column is dropped when its norm falls
/// below this fraction of the incoming column norm.
pub const TOL_RANK: f64 = 1e-10;

/// A matrix with orthonormal columns, extendable in place.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    q: DMatrix<Complex64>,
}

impl OrthonormalBasis {
    pub fn empty(ambient_dim: usize) -> Self {
        OrthonormalBasis {
            q: DMatrix::zeros(ambient_dim, 0),
        }
    }

    /// Build from columns, orthonormalizing and dropping dependent directions.
    pub fn from_columns(cols: &DMatrix<Complex64>) -> Self {
        let mut basis = Self::empty(cols.nrows());
        basis.extend(cols);
        basis
    }

    pub fn ambient_dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn dim(&self) -> usize {
        self.q.ncols()
    }

    pub fn columns(&self) -> &DMatrix<Complex64> {
        &self.q
    }

    /// Residual of `col` after two projection passes against the basis,
    /// together with the incoming norm.
    pub fn orthogonal_residual(&self, col: &DVector<Complex64>) -> (DVector<Complex64>, f64) {
        assert_eq!(col.len(), self.ambient_dim());
        let norm_in = col.norm();
        let mut r = col.clone();
        if self.dim() > 0 {
            for _ in 0..2 {
                let coeffs = self.q.adjoint() * &r;
                r -= &self.q * coeffs;
            }
        }
        (r, norm_in)
    }

    /// Whether a residual of the given norm survives the rank guard.
    pub fn admits(residual_norm: f64, incoming_norm: f64) -> bool {
        incoming_norm > 0.0 && residual_norm > TOL_RANK * incoming_norm
    }

    /// Append a column that is already orthonormal to the basis.
    pub fn push_unit(&mut self, unit_col: &DVector<Complex64>) {
        assert_eq!(unit_col.len(), self.ambient_dim());
        let n = self.ambient_dim();
        let d = self.dim();
        let mut q = DMatrix::zeros(n, d + 1);
        q.view_mut((0, 0), (n, d)).copy_from(&self.q);
        q.set_column(d, unit_col);
        self.q = q;
    }

    /// Extend by the columns of `new_cols`, dropping dependent directions.
    /// Returns one admission flag per incoming column.
    pub fn extend(&mut self, new_cols: &DMatrix<Complex64>) -> Vec<bool> {
        let mut admitted = Vec::with_capacity(new_cols.ncols());
        for j in 0..new_cols.ncols() {
            let col = DVector::from(new_cols.column(j).clone_owned());
            let (r, norm_in) = self.orthogonal_residual(&col);
            let norm_out = r.norm();
            if Self::admits(norm_out, norm_in) {
                self.push_unit(&(r / Complex64::new(norm_out, 0.0)));
                admitted.push(true);
            } else {
                admitted.push(false);
            }
        }
        admitted
    }

    /// `||Q^H Q - I||_F`, the orthonormality defect.
    pub fn orthonormality_defect(&self) -> f64 {
        let d = self.dim();
        let g = self.q.adjoint() * &self.q - DMatrix::<Complex64>::identity(d, d);
        g.norm()
    }
}

/// Basis extension as a pure function: the spanned space grows by the
/// independent directions among `new_cols`.
pub fn extend_basis(basis: &OrthonormalBasis, new_cols: &DMatrix<Complex64>) -> OrthonormalBasis {
    let mut out = basis.clone();
    out.extend(new_cols);
    out
}
