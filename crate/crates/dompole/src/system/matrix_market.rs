//! Matrix Market reader and writer.
//!
//! Supports coordinate files (real, complex, integer, pattern; general,
//! symmetric, skew-symmetric, hermitian) and array files (real, complex;
//! general). The writer emits shortest-round-trip decimal literals, so a
//! save/load cycle reproduces every entry bit-exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::sparse::SparseMatrix;
use crate::{Error, Result};

/// Payload of one `.mtx` file.
#[derive(Debug, Clone)]
pub enum MatrixData {
    /// Coordinate entries `(row, col, value)`, zero-based.
    Sparse(Vec<(usize, usize, Complex64)>),
    /// Column-major dense block.
    Dense(DMatrix<Complex64>),
}

/// A parsed Matrix Market file.
#[derive(Debug, Clone)]
pub struct MatrixFile {
    pub nrows: usize,
    pub ncols: usize,
    pub complex: bool,
    pub data: MatrixData,
}

impl MatrixFile {
    pub fn to_sparse(&self) -> SparseMatrix {
        match &self.data {
            MatrixData::Sparse(entries) => SparseMatrix::from_triplets(self.nrows, self.ncols, entries),
            MatrixData::Dense(m) => SparseMatrix::from_dense(m),
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        match &self.data {
            MatrixData::Sparse(entries) => {
                let mut m = DMatrix::zeros(self.nrows, self.ncols);
                for &(i, j, v) in entries {
                    m[(i, j)] += v;
                }
                m
            }
            MatrixData::Dense(m) => m.clone(),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Real,
    Integer,
    Complex,
    Pattern,
}

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

pub fn read_matrix(path: &Path) -> Result<MatrixFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let loc = path.display().to_string();
    let mut lines = text.lines();

    let header = lines
        .next()
        .ok_or_else(|| Error::format(&loc, "empty file"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() < 5 || !tokens[0].eq_ignore_ascii_case("%%MatrixMarket") {
        return Err(Error::format(&loc, "first line must be a %%MatrixMarket header"));
    }
    if !tokens[1].eq_ignore_ascii_case("matrix") {
        return Err(Error::format(&loc, "object must be 'matrix'"));
    }
    let coordinate = match tokens[2].to_ascii_lowercase().as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(Error::format(&loc, format!("unsupported format '{other}'"))),
    };
    let field = match tokens[3].to_ascii_lowercase().as_str() {
        "real" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        "pattern" => Field::Pattern,
        other => return Err(Error::format(&loc, format!("unsupported field '{other}'"))),
    };
    let symmetry = match tokens[4].to_ascii_lowercase().as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(Error::format(&loc, format!("unsupported symmetry '{other}'"))),
    };
    if !coordinate && field == Field::Pattern {
        return Err(Error::format(&loc, "array files cannot be pattern"));
    }

    let mut data_lines = lines.filter(|l| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let size_line = data_lines
        .next()
        .ok_or_else(|| Error::format(&loc, "missing size line"))?;
    let size_tokens: Vec<&str> = size_line.split_whitespace().collect();

    let parse_usize = |s: &str| -> Result<usize> {
        s.parse::<usize>()
            .map_err(|_| Error::format(&loc, format!("bad integer '{s}'")))
    };
    let parse_f64 = |s: &str| -> Result<f64> {
        // Fortran-style exponent markers appear in the wild
        let normalized = s.replace(['D', 'd'], "e");
        normalized
            .parse::<f64>()
            .map_err(|_| Error::format(&loc, format!("bad number '{s}'")))
    };

    if coordinate {
        if size_tokens.len() != 3 {
            return Err(Error::format(&loc, "coordinate size line must be 'rows cols nnz'"));
        }
        let nrows = parse_usize(size_tokens[0])?;
        let ncols = parse_usize(size_tokens[1])?;
        let nnz = parse_usize(size_tokens[2])?;
        let mut entries = Vec::with_capacity(nnz);
        for _ in 0..nnz {
            let line = data_lines
                .next()
                .ok_or_else(|| Error::format(&loc, "fewer entries than the size line declares"))?;
            let t: Vec<&str> = line.split_whitespace().collect();
            let needed = match field {
                Field::Pattern => 2,
                Field::Complex => 4,
                _ => 3,
            };
            if t.len() < needed {
                return Err(Error::format(&loc, format!("short entry line '{line}'")));
            }
            let i = parse_usize(t[0])?;
            let j = parse_usize(t[1])?;
            if i == 0 || j == 0 || i > nrows || j > ncols {
                return Err(Error::format(&loc, format!("index ({i}, {j}) out of range")));
            }
            let value = match field {
                Field::Pattern => Complex64::new(1.0, 0.0),
                Field::Complex => Complex64::new(parse_f64(t[2])?, parse_f64(t[3])?),
                _ => Complex64::new(parse_f64(t[2])?, 0.0),
            };
            entries.push((i - 1, j - 1, value));
        }
        if data_lines.next().is_some() {
            return Err(Error::format(&loc, "more entries than the size line declares"));
        }
        // expand symmetry to the full general pattern
        if symmetry != Symmetry::General {
            let mut expanded = entries.clone();
            for &(i, j, v) in &entries {
                if i != j {
                    let mirrored = match symmetry {
                        Symmetry::Symmetric => v,
                        Symmetry::SkewSymmetric => -v,
                        Symmetry::Hermitian => v.conj(),
                        Symmetry::General => unreachable!(),
                    };
                    expanded.push((j, i, mirrored));
                }
            }
            entries = expanded;
        }
        Ok(MatrixFile {
            nrows,
            ncols,
            complex: field == Field::Complex,
            data: MatrixData::Sparse(entries),
        })
    } else {
        if size_tokens.len() != 2 {
            return Err(Error::format(&loc, "array size line must be 'rows cols'"));
        }
        let nrows = parse_usize(size_tokens[0])?;
        let ncols = parse_usize(size_tokens[1])?;
        if symmetry != Symmetry::General {
            return Err(Error::format(&loc, "array files must be general"));
        }
        let mut values = Vec::with_capacity(nrows * ncols);
        for _ in 0..nrows * ncols {
            let line = data_lines
                .next()
                .ok_or_else(|| Error::format(&loc, "fewer values than rows*cols"))?;
            let t: Vec<&str> = line.split_whitespace().collect();
            let value = match field {
                Field::Complex => {
                    if t.len() < 2 {
                        return Err(Error::format(&loc, format!("short value line '{line}'")));
                    }
                    Complex64::new(parse_f64(t[0])?, parse_f64(t[1])?)
                }
                _ => {
                    if t.is_empty() {
                        return Err(Error::format(&loc, "blank value line"));
                    }
                    Complex64::new(parse_f64(t[0])?, 0.0)
                }
            };
            values.push(value);
        }
        if data_lines.next().is_some() {
            return Err(Error::format(&loc, "more values than rows*cols"));
        }
        Ok(MatrixFile {
            nrows,
            ncols,
            complex: field == Field::Complex,
            data: MatrixData::Dense(DMatrix::from_vec(nrows, ncols, values)),
        })
    }
}

fn fmt_value(out: &mut String, v: Complex64, complex: bool) {
    if complex {
        let _ = writeln!(out, "{} {}", v.re, v.im);
    } else {
        let _ = writeln!(out, "{}", v.re);
    }
}

/// Write a sparse matrix in coordinate format. Real data is written with the
/// `real` field, otherwise `complex`.
pub fn write_sparse(path: &Path, m: &SparseMatrix) -> Result<()> {
    let complex = !m.is_real();
    let mut out = String::new();
    let field = if complex { "complex" } else { "real" };
    let _ = writeln!(out, "%%MatrixMarket matrix coordinate {field} general");
    let _ = writeln!(out, "{} {} {}", m.nrows(), m.ncols(), m.nnz());
    for (i, j, v) in m.iter() {
        let _ = write!(out, "{} {} ", i + 1, j + 1);
        fmt_value(&mut out, v, complex);
    }
    fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Write a dense matrix in array format.
pub fn write_dense(path: &Path, m: &DMatrix<Complex64>) -> Result<()> {
    let complex = m.iter().any(|v| v.im != 0.0);
    let mut out = String::new();
    let field = if complex { "complex" } else { "real" };
    let _ = writeln!(out, "%%MatrixMarket matrix array {field} general");
    let _ = writeln!(out, "{} {}", m.nrows(), m.ncols());
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            fmt_value(&mut out, m[(i, j)], complex);
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
}
