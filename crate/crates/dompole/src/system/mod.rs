//! The descriptor-system data model, validation, Matrix Market ingestion, and
//! synthetic-system generation.

mod generator;
pub mod matrix_market;

pub use generator::{generate_random_system, SpectrumRecipe};

use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::counters::RunCounters;
use crate::kernels::{factor_shifted, ShiftedFactorization};
use crate::sparse::SparseMatrix;
use crate::{Error, Result};

/// State-space data `E x' = A x + B u`, `y = C x + D u` with sparse `A`, `E`
/// and dense `B`, `C`, `D`. Immutable after construction.
#[derive(Debug)]
pub struct DescriptorSystem {
    a: SparseMatrix,
    e: SparseMatrix,
    b: DMatrix<Complex64>,
    c: DMatrix<Complex64>,
    d: DMatrix<Complex64>,
    is_real: bool,
    counters: Arc<RunCounters>,
}

impl DescriptorSystem {
    /// Validate dimensions and build a system. Requires square `A`, `E` of
    /// equal order `n` and `n >= m`, `n >= p`.
    pub fn new(
        a: SparseMatrix,
        e: SparseMatrix,
        b: DMatrix<Complex64>,
        c: DMatrix<Complex64>,
        d: DMatrix<Complex64>,
    ) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "A must be square, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if e.nrows() != n || e.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "E must match A: expected {n}x{n}, got {}x{}",
                e.nrows(),
                e.ncols()
            )));
        }
        if b.nrows() != n {
            return Err(Error::DimensionMismatch(format!(
                "B must have {n} rows, got {}",
                b.nrows()
            )));
        }
        if c.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "C must have {n} columns, got {}",
                c.ncols()
            )));
        }
        let m = b.ncols();
        let p = c.nrows();
        if d.nrows() != p || d.ncols() != m {
            return Err(Error::DimensionMismatch(format!(
                "D must be {p}x{m}, got {}x{}",
                d.nrows(),
                d.ncols()
            )));
        }
        if n < m || n < p {
            return Err(Error::DimensionMismatch(format!(
                "need n >= m and n >= p, got n = {n}, m = {m}, p = {p}"
            )));
        }
        let is_real = a.is_real()
            && e.is_real()
            && b.iter().all(|v| v.im == 0.0)
            && c.iter().all(|v| v.im == 0.0)
            && d.iter().all(|v| v.im == 0.0);
        Ok(DescriptorSystem {
            a,
            e,
            b,
            c,
            d,
            is_real,
            counters: Arc::new(RunCounters::default()),
        })
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn num_inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn num_outputs(&self) -> usize {
        self.c.nrows()
    }

    pub fn a(&self) -> &SparseMatrix {
        &self.a
    }

    pub fn e(&self) -> &SparseMatrix {
        &self.e
    }

    pub fn b(&self) -> &DMatrix<Complex64> {
        &self.b
    }

    pub fn c(&self) -> &DMatrix<Complex64> {
        &self.c
    }

    pub fn d(&self) -> &DMatrix<Complex64> {
        &self.d
    }

    /// True iff every stored entry has zero imaginary part; derived from the
    /// data, not from the file type. Conjugate-pair handling keys off this.
    pub fn is_real(&self) -> bool {
        self.is_real
    }

    /// LU/solve event counters shared by every factorization of this system.
    pub fn counters(&self) -> &Arc<RunCounters> {
        &self.counters
    }

    /// Factor `A - μE`, counting the factorization.
    pub fn factor_at(&self, mu: Complex64) -> Result<ShiftedFactorization> {
        factor_shifted(&self.a, &self.e, mu, &self.counters)
    }
}

/// Size and provenance record for a loaded system.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemMetadata {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub nnz_a: usize,
    pub nnz_e: usize,
    pub source_paths: Vec<String>,
}

/// Per-matrix file locations for [`load_system`]. Only `a` is mandatory.
#[derive(Debug, Clone, Default)]
pub struct SystemPaths {
    pub a: PathBuf,
    pub e: Option<PathBuf>,
    pub b: Option<PathBuf>,
    pub c: Option<PathBuf>,
    pub d: Option<PathBuf>,
    pub name: Option<String>,
}

/// Load a system from Matrix Market files.
///
/// Defaults for absent files: `E = I`, `B = ones(n, 1)`, `C = ones(1, n)`,
/// `D = 0`, so any sparse pencil can be probed as a SISO system immediately.
pub fn load_system(paths: &SystemPaths) -> Result<(DescriptorSystem, SystemMetadata)> {
    let mut sources = vec![paths.a.display().to_string()];
    let a_file = matrix_market::read_matrix(&paths.a)?;
    if a_file.nrows != a_file.ncols {
        return Err(Error::DimensionMismatch(format!(
            "A must be square, got {}x{} in {}",
            a_file.nrows,
            a_file.ncols,
            paths.a.display()
        )));
    }
    let n = a_file.nrows;
    let a = a_file.to_sparse();

    let e = match &paths.e {
        Some(path) => {
            sources.push(path.display().to_string());
            let f = matrix_market::read_matrix(path)?;
            if f.nrows != n || f.ncols != n {
                return Err(Error::DimensionMismatch(format!(
                    "E is {}x{} but A is {n}x{n}",
                    f.nrows, f.ncols
                )));
            }
            f.to_sparse()
        }
        None => SparseMatrix::identity(n),
    };

    let b = match &paths.b {
        Some(path) => {
            sources.push(path.display().to_string());
            let f = matrix_market::read_matrix(path)?;
            if f.nrows != n {
                return Err(Error::DimensionMismatch(format!(
                    "B has {} rows but A is {n}x{n}",
                    f.nrows
                )));
            }
            f.to_dense()
        }
        None => DMatrix::from_element(n, 1, Complex64::new(1.0, 0.0)),
    };

    let c = match &paths.c {
        Some(path) => {
            sources.push(path.display().to_string());
            let f = matrix_market::read_matrix(path)?;
            if f.ncols != n {
                return Err(Error::DimensionMismatch(format!(
                    "C has {} columns but A is {n}x{n}",
                    f.ncols
                )));
            }
            f.to_dense()
        }
        None => DMatrix::from_element(1, n, Complex64::new(1.0, 0.0)),
    };

    let d = match &paths.d {
        Some(path) => {
            sources.push(path.display().to_string());
            let f = matrix_market::read_matrix(path)?;
            if f.nrows != c.nrows() || f.ncols != b.ncols() {
                return Err(Error::DimensionMismatch(format!(
                    "D is {}x{} but C, B imply {}x{}",
                    f.nrows,
                    f.ncols,
                    c.nrows(),
                    b.ncols()
                )));
            }
            f.to_dense()
        }
        None => DMatrix::zeros(c.nrows(), b.ncols()),
    };

    let name = paths.name.clone().unwrap_or_else(|| {
        paths
            .a
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "system".to_string())
    });
    let system = DescriptorSystem::new(a, e, b, c, d)?;
    let metadata = SystemMetadata {
        name,
        n,
        m: system.num_inputs(),
        p: system.num_outputs(),
        nnz_a: system.a.nnz(),
        nnz_e: system.e.nnz(),
        source_paths: sources,
    };
    Ok((system, metadata))
}

/// Write all five matrices of a system plus a JSON metadata sidecar into
/// `dir`, returning the paths for a later [`load_system`].
pub fn save_system(system: &DescriptorSystem, dir: &Path, name: &str) -> Result<SystemPaths> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let path = |suffix: &str| dir.join(format!("{name}_{suffix}.mtx"));
    let paths = SystemPaths {
        a: path("A"),
        e: Some(path("E")),
        b: Some(path("B")),
        c: Some(path("C")),
        d: Some(path("D")),
        name: Some(name.to_string()),
    };
    matrix_market::write_sparse(&paths.a, &system.a)?;
    matrix_market::write_sparse(paths.e.as_ref().unwrap(), &system.e)?;
    matrix_market::write_dense(paths.b.as_ref().unwrap(), &system.b)?;
    matrix_market::write_dense(paths.c.as_ref().unwrap(), &system.c)?;
    matrix_market::write_dense(paths.d.as_ref().unwrap(), &system.d)?;
    let metadata = SystemMetadata {
        name: name.to_string(),
        n: system.order(),
        m: system.num_inputs(),
        p: system.num_outputs(),
        nnz_a: system.a.nnz(),
        nnz_e: system.e.nnz(),
        source_paths: vec![paths.a.display().to_string()],
    };
    let json = serde_json::to_string_pretty(&metadata)
        .expect("metadata serialization cannot fail");
    let meta_path = dir.join(format!("{name}.json"));
    std::fs::write(&meta_path, json).map_err(|e| Error::io(meta_path.display().to_string(), e))?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c64(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn band_system(n: usize, m: usize, p: usize) -> DescriptorSystem {
        let mut triplets = Vec::new();
        for i in 0..n {
            triplets.push((i, i, c64(-(1.0 + i as f64))));
            if i + 1 < n {
                triplets.push((i, i + 1, c64(0.25)));
            }
        }
        let a = SparseMatrix::from_triplets(n, n, &triplets);
        let e = SparseMatrix::identity(n);
        let b = DMatrix::from_fn(n, m, |i, j| c64(((i + j) % 5) as f64 - 2.0));
        let c = DMatrix::from_fn(p, n, |i, j| c64(((i * 3 + j) % 7) as f64 - 3.0));
        let d = DMatrix::zeros(p, m);
        DescriptorSystem::new(a, e, b, c, d).unwrap()
    }

    #[test]
    fn load_with_all_files_recovers_shape() {
        let dir = tempfile::tempdir().unwrap();
        let sys = band_system(270, 3, 3);
        let paths = save_system(&sys, dir.path(), "shaped").unwrap();
        let (loaded, meta) = load_system(&paths).unwrap();
        assert_eq!(loaded.order(), 270);
        assert_eq!(loaded.num_inputs(), 3);
        assert_eq!(loaded.num_outputs(), 3);
        assert_eq!(meta.n, 270);
        assert_eq!(meta.nnz_a, sys.a().nnz());
        assert!(loaded.is_real());
    }

    #[test]
    fn missing_files_get_documented_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let sys = band_system(10, 2, 2);
        let all = save_system(&sys, dir.path(), "defaults").unwrap();
        let only_a = SystemPaths {
            a: all.a.clone(),
            ..Default::default()
        };
        let (loaded, _) = load_system(&only_a).unwrap();
        assert_eq!(loaded.order(), 10);
        assert_eq!(loaded.num_inputs(), 1);
        assert_eq!(loaded.num_outputs(), 1);
        let e_dense = loaded.e().to_dense();
        assert!(e_dense
            .iter()
            .enumerate()
            .all(|(k, v)| *v == if k % 11 == 0 { c64(1.0) } else { c64(0.0) }));
        assert!(loaded.b().iter().all(|v| *v == c64(1.0)));
        assert!(loaded.c().iter().all(|v| *v == c64(1.0)));
        assert!(loaded.d().iter().all(|v| *v == c64(0.0)));
    }

    #[test]
    fn row_count_mismatch_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let sys = band_system(270, 3, 3);
        let paths = save_system(&sys, dir.path(), "sys").unwrap();
        let tall = band_system(271, 3, 3);
        let tall_paths = save_system(&tall, dir.path(), "tall").unwrap();
        let mixed = SystemPaths {
            a: paths.a.clone(),
            b: tall_paths.b.clone(),
            ..Default::default()
        };
        assert!(matches!(
            load_system(&mixed),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn save_load_roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let sys = band_system(30, 2, 3);
        let paths = save_system(&sys, dir.path(), "rt").unwrap();
        let (loaded, _) = load_system(&paths).unwrap();
        assert_eq!(loaded.a(), sys.a());
        assert_eq!(loaded.e(), sys.e());
        assert_eq!(loaded.b(), sys.b());
        assert_eq!(loaded.c(), sys.c());
        assert_eq!(loaded.d(), sys.d());
    }
}
