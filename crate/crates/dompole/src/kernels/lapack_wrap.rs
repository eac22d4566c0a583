//! Thin safe wrappers around the LAPACK routines used by this crate.
//!
//! All dense containers are `nalgebra` matrices, which are column-major and
//! therefore pass straight into LAPACK without copies beyond what the
//! routines destroy.

use std::sync::Once;

use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);

extern "C" {
    fn openblas_set_num_threads(num: i32);
}

static BLAS_INIT: Once = Once::new();

/// OpenBLAS's threaded kernels need more stack than the 2 MiB a spawned
/// thread gets and make run times scheduling-dependent; the matrices here are
/// small enough that the serial path is the right one. The sparse backend is
/// pinned to sequential execution for the same reproducibility reason.
pub(crate) fn ensure_serial_backends() {
    BLAS_INIT.call_once(|| {
        unsafe { openblas_set_num_threads(1) };
        faer::set_global_parallelism(faer::Par::Seq);
    });
}

fn ensure_serial_blas() {
    ensure_serial_backends();
}

/// LU factorization `P M = L U` of a square matrix, kept in LAPACK layout.
#[derive(Debug, Clone)]
pub(crate) struct DenseLu {
    factors: DMatrix<Complex64>,
    ipiv: Vec<i32>,
    n: usize,
    /// Exactly-zero pivot reported by `zgetrf` (`info > 0`).
    zero_pivot: bool,
}

impl DenseLu {
    pub(crate) fn factor(mut m: DMatrix<Complex64>) -> Result<Self> {
        ensure_serial_blas();
        let n = m.nrows();
        assert_eq!(n, m.ncols(), "LU factorization requires a square matrix");
        let mut ipiv = vec![0i32; n.max(1)];
        let mut info = 0i32;
        if n > 0 {
            unsafe {
                lapack::zgetrf(
                    n as i32,
                    n as i32,
                    m.as_mut_slice(),
                    n as i32,
                    &mut ipiv,
                    &mut info,
                );
            }
        }
        if info < 0 {
            return Err(Error::Lapack {
                routine: "zgetrf",
                info,
            });
        }
        Ok(DenseLu {
            factors: m,
            ipiv,
            n,
            zero_pivot: info > 0,
        })
    }

    pub(crate) fn zero_pivot(&self) -> bool {
        self.zero_pivot
    }

    /// Smallest magnitude on the diagonal of `U`.
    pub(crate) fn min_pivot(&self) -> f64 {
        (0..self.n)
            .map(|i| self.factors[(i, i)].norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Solve `M X = B` (`adjoint = false`) or `M^H X = B` (`adjoint = true`).
    pub(crate) fn solve(&self, rhs: &DMatrix<Complex64>, adjoint: bool) -> Result<DMatrix<Complex64>> {
        assert_eq!(rhs.nrows(), self.n);
        let mut x = rhs.clone();
        if self.n == 0 || rhs.ncols() == 0 {
            return Ok(x);
        }
        let mut info = 0i32;
        unsafe {
            lapack::zgetrs(
                if adjoint { b'C' } else { b'N' },
                self.n as i32,
                rhs.ncols() as i32,
                self.factors.as_slice(),
                self.n as i32,
                &self.ipiv,
                x.as_mut_slice(),
                self.n as i32,
                &mut info,
            );
        }
        if info != 0 {
            return Err(Error::Lapack {
                routine: "zgetrs",
                info,
            });
        }
        Ok(x)
    }
}

/// Raw output of the QZ eigensolver: `β_j λ_j = α_j` pairs with unit-norm
/// left and right eigenvector columns.
pub(crate) struct GeneralizedEig {
    pub alpha: Vec<Complex64>,
    pub beta: Vec<Complex64>,
    pub left: DMatrix<Complex64>,
    pub right: DMatrix<Complex64>,
}

/// Full generalized eigendecomposition of the dense pencil `(A, E)` with left
/// and right eigenvectors, via `zggev`.
pub(crate) fn generalized_eig(
    a: &DMatrix<Complex64>,
    e: &DMatrix<Complex64>,
) -> Result<GeneralizedEig> {
    ensure_serial_blas();
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    assert_eq!(e.nrows(), n);
    assert_eq!(e.ncols(), n);
    if n == 0 {
        return Ok(GeneralizedEig {
            alpha: vec![],
            beta: vec![],
            left: DMatrix::zeros(0, 0),
            right: DMatrix::zeros(0, 0),
        });
    }
    let mut a = a.clone();
    let mut e = e.clone();
    let mut alpha = vec![C_ZERO; n];
    let mut beta = vec![C_ZERO; n];
    let mut left = DMatrix::from_element(n, n, C_ZERO);
    let mut right = DMatrix::from_element(n, n, C_ZERO);
    let mut rwork = vec![0.0f64; 8 * n];
    let mut info = 0i32;

    // workspace query, then the actual call
    let mut work_query = [C_ZERO];
    unsafe {
        lapack::zggev(
            b'V',
            b'V',
            n as i32,
            a.as_mut_slice(),
            n as i32,
            e.as_mut_slice(),
            n as i32,
            &mut alpha,
            &mut beta,
            left.as_mut_slice(),
            n as i32,
            right.as_mut_slice(),
            n as i32,
            &mut work_query,
            -1,
            &mut rwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "zggev",
            info,
        });
    }
    let lwork = (work_query[0].re as usize).max(2 * n);
    let mut work = vec![C_ZERO; lwork];
    unsafe {
        lapack::zggev(
            b'V',
            b'V',
            n as i32,
            a.as_mut_slice(),
            n as i32,
            e.as_mut_slice(),
            n as i32,
            &mut alpha,
            &mut beta,
            left.as_mut_slice(),
            n as i32,
            right.as_mut_slice(),
            n as i32,
            &mut work,
            lwork as i32,
            &mut rwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "zggev",
            info,
        });
    }
    Ok(GeneralizedEig {
        alpha,
        beta,
        left,
        right,
    })
}

/// All singular values of a dense matrix, in descending order, via `zgesvd`.
pub(crate) fn singular_values(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    ensure_serial_blas();
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Ok(vec![]);
    }
    let mut a = m.clone();
    let mut s = vec![0.0f64; k];
    let mut u = [C_ZERO];
    let mut vt = [C_ZERO];
    let mut rwork = vec![0.0f64; 5 * k];
    let mut info = 0i32;
    let mut work_query = [C_ZERO];
    unsafe {
        lapack::zgesvd(
            b'N',
            b'N',
            rows as i32,
            cols as i32,
            a.as_mut_slice(),
            rows as i32,
            &mut s,
            &mut u,
            1,
            &mut vt,
            1,
            &mut work_query,
            -1,
            &mut rwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "zgesvd",
            info,
        });
    }
    let lwork = (work_query[0].re as usize).max(3 * k + rows.max(cols));
    let mut work = vec![C_ZERO; lwork];
    unsafe {
        lapack::zgesvd(
            b'N',
            b'N',
            rows as i32,
            cols as i32,
            a.as_mut_slice(),
            rows as i32,
            &mut s,
            &mut u,
            1,
            &mut vt,
            1,
            &mut work,
            lwork as i32,
            &mut rwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "zgesvd",
            info,
        });
    }
    Ok(s)
}
