//! Operations defined directly on transfer functions: evaluation of `H(s)`
//! and its derivatives, dominance metrics and residues, modal reduced-order
//! models with their error bound, σ-max frequency sweeps, and the reciprocal
//! squared-norm diagnostic `f(s) = 1 / ||H(s)||_F^2`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::system::DescriptorSystem;
use crate::{kernels, Error, Result};

/// Anything that can be evaluated as a `p x m` transfer function over the
/// complex plane.
pub trait TransferFunction {
    fn num_inputs(&self) -> usize;
    fn num_outputs(&self) -> usize;

    /// `H(s)`; fails with [`Error::SingularShift`] when `s` is a pole.
    fn eval(&self, s: Complex64) -> Result<DMatrix<Complex64>>;

    /// The `j`-th derivative `H^{(j)}(s)`; `j = 0` falls back to [`eval`].
    ///
    /// [`eval`]: TransferFunction::eval
    fn eval_derivative(&self, s: Complex64, j: usize) -> Result<DMatrix<Complex64>>;
}

fn factorial(j: usize) -> f64 {
    (1..=j).map(|k| k as f64).product()
}

impl TransferFunction for DescriptorSystem {
    fn num_inputs(&self) -> usize {
        self.num_inputs()
    }

    fn num_outputs(&self) -> usize {
        self.num_outputs()
    }

    /// One shifted factorization and `m` solves: `H(s) = -C (A - sE)^{-1} B + D`.
    fn eval(&self, s: Complex64) -> Result<DMatrix<Complex64>> {
        let f = self.factor_at(s)?;
        let x = f.solve(self.b())?;
        Ok(self.d() - self.c() * x)
    }

    /// `H^{(j)}(s) = -j! C [(A - sE)^{-1} E]^j (A - sE)^{-1} B` for `j >= 1`,
    /// evaluated with one factorization and a solve chain.
    fn eval_derivative(&self, s: Complex64, j: usize) -> Result<DMatrix<Complex64>> {
        if j == 0 {
            return self.eval(s);
        }
        let f = self.factor_at(s)?;
        let mut x = f.solve(self.b())?;
        for _ in 0..j {
            x = f.solve(&self.e().mul_dense(&x))?;
        }
        Ok(-(self.c() * x) * Complex64::new(factorial(j), 0.0))
    }
}

/// `H(s)` for any transfer function.
pub fn eval_transfer<T: TransferFunction + ?Sized>(
    tf: &T,
    s: Complex64,
) -> Result<DMatrix<Complex64>> {
    tf.eval(s)
}

/// `H^{(j)}(s)` for any transfer function.
pub fn eval_transfer_derivative<T: TransferFunction + ?Sized>(
    tf: &T,
    s: Complex64,
    j: usize,
) -> Result<DMatrix<Complex64>> {
    tf.eval_derivative(s, j)
}

/// A pole with its eigentriple, residue factors, and dominance metric.
///
/// Vectors are normalized so that `w^H E v = 1` with the scale absorbed into
/// `v`; `cv = C v` and `wb = (w^H B)^T` are the residue factors of the
/// rank-one term `cv wb^T / (s - λ)`.
#[derive(Debug, Clone)]
pub struct PoleData {
    pub lambda: Complex64,
    pub v: DVector<Complex64>,
    pub w: DVector<Complex64>,
    pub cv: DVector<Complex64>,
    pub wb: DVector<Complex64>,
    /// `||C v||_2 ||w^H B||_2` after normalization.
    pub residue_norm_product: f64,
    /// `residue_norm_product / |Re λ|`; `+inf` when `Re λ = 0`.
    pub dominance: f64,
}

fn pole_data_core(
    lambda: Complex64,
    v: &DVector<Complex64>,
    w: &DVector<Complex64>,
    e_v: DVector<Complex64>,
    e_norm_one: f64,
    b: &DMatrix<Complex64>,
    c: &DMatrix<Complex64>,
) -> Result<PoleData> {
    let scale = w.dotc(&e_v);
    let tol_norm = 1e-12 * v.norm() * e_norm_one * w.norm();
    if scale.norm() <= tol_norm {
        return Err(Error::DegenerateEigenvector {
            lambda,
            magnitude: scale.norm(),
        });
    }
    let v = v / scale;
    let cv = c * &v;
    let m = b.ncols();
    let wb = DVector::from_fn(m, |j, _| w.dotc(&b.column(j).clone_owned()));
    let residue_norm_product = cv.norm() * wb.norm();
    let dominance = if lambda.re == 0.0 {
        log::warn!("pole {lambda} sits on the imaginary axis; its dominance is unbounded");
        f64::INFINITY
    } else {
        residue_norm_product / lambda.re.abs()
    };
    Ok(PoleData {
        lambda,
        v,
        w: w.clone(),
        cv,
        wb,
        residue_norm_product,
        dominance,
    })
}

/// Build [`PoleData`] from an eigentriple of the full system pencil.
pub fn pole_data_from_eigentriple(
    system: &DescriptorSystem,
    lambda: Complex64,
    v: &DVector<Complex64>,
    w: &DVector<Complex64>,
) -> Result<PoleData> {
    let e_v = system.e().mul_vec(v);
    pole_data_core(
        lambda,
        v,
        w,
        e_v,
        system.e().norm_one(),
        system.b(),
        system.c(),
    )
}

/// Build [`PoleData`] from an eigentriple of a dense pencil with dense
/// input/output blocks (the projected system).
pub fn pole_data_from_dense_triple(
    e: &DMatrix<Complex64>,
    b: &DMatrix<Complex64>,
    c: &DMatrix<Complex64>,
    lambda: Complex64,
    v: &DVector<Complex64>,
    w: &DVector<Complex64>,
) -> Result<PoleData> {
    let e_v = e * v;
    let e_norm_one = (0..e.ncols())
        .map(|j| e.column(j).iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    pole_data_core(lambda, v, w, e_v, e_norm_one, b, c)
}

/// Total order on poles: non-increasing dominance, ties broken by smaller
/// `|Re λ|`, then smaller `|λ|`, then lexicographic `(Re, Im)`.
pub fn dominance_order(a: &PoleData, b: &PoleData) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    b.dominance
        .partial_cmp(&a.dominance)
        .unwrap_or(Ordering::Equal)
        .then_with(|| {
            a.lambda
                .re
                .abs()
                .partial_cmp(&b.lambda.re.abs())
                .unwrap_or(Ordering::Equal)
        })
        .then_with(|| {
            a.lambda
                .norm()
                .partial_cmp(&b.lambda.norm())
                .unwrap_or(Ordering::Equal)
        })
        .then_with(|| a.lambda.re.partial_cmp(&b.lambda.re).unwrap_or(Ordering::Equal))
        .then_with(|| a.lambda.im.partial_cmp(&b.lambda.im).unwrap_or(Ordering::Equal))
}

/// Sort poles by [`dominance_order`].
pub fn dominance_sort(mut poles: Vec<PoleData>) -> Vec<PoleData> {
    poles.sort_by(dominance_order);
    poles
}

/// Truncation of the partial-fraction expansion to the retained poles plus a
/// constant term.
#[derive(Debug, Clone)]
pub struct ModalModel {
    pub poles: Vec<PoleData>,
    /// The constant term of the expansion (`M_inf + D`; just `D` when `E` is
    /// invertible).
    pub constant: DMatrix<Complex64>,
}

impl ModalModel {
    /// Number of retained poles.
    pub fn order(&self) -> usize {
        self.poles.len()
    }
}

/// Assemble a modal model from retained poles and a constant term.
pub fn modal_reduce(poles: &[PoleData], constant: DMatrix<Complex64>) -> Result<ModalModel> {
    let (p, m) = constant.shape();
    for pole in poles {
        if pole.cv.len() != p || pole.wb.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "residue factors of pole {} are {}x{} but the constant term is {p}x{m}",
                pole.lambda,
                pole.cv.len(),
                pole.wb.len()
            )));
        }
    }
    Ok(ModalModel {
        poles: poles.to_vec(),
        constant,
    })
}

/// Upper bound on the modal truncation error: the sum of the dominance
/// metrics of the dropped poles. Undefined if a dropped pole sits on the
/// imaginary axis.
pub fn modal_error_bound(tail: &[PoleData]) -> Result<f64> {
    let mut bound = 0.0;
    for pole in tail {
        if pole.lambda.re == 0.0 {
            return Err(Error::UnboundedError { pole: pole.lambda });
        }
        bound += pole.dominance;
    }
    Ok(bound)
}

impl TransferFunction for ModalModel {
    fn num_inputs(&self) -> usize {
        self.constant.ncols()
    }

    fn num_outputs(&self) -> usize {
        self.constant.nrows()
    }

    fn eval(&self, s: Complex64) -> Result<DMatrix<Complex64>> {
        let mut h = self.constant.clone();
        for pole in &self.poles {
            let denom = s - pole.lambda;
            if denom.norm() == 0.0 {
                return Err(Error::SingularShift { shift: s });
            }
            let coeff = Complex64::new(1.0, 0.0) / denom;
            h += (&pole.cv * pole.wb.transpose()) * coeff;
        }
        Ok(h)
    }

    fn eval_derivative(&self, s: Complex64, j: usize) -> Result<DMatrix<Complex64>> {
        if j == 0 {
            return self.eval(s);
        }
        let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
        let jf = sign * factorial(j);
        let mut h = DMatrix::zeros(self.num_outputs(), self.num_inputs());
        for pole in &self.poles {
            let denom = s - pole.lambda;
            if denom.norm() == 0.0 {
                return Err(Error::SingularShift { shift: s });
            }
            let coeff = Complex64::new(jf, 0.0) / denom.powu(j as u32 + 1);
            h += (&pole.cv * pole.wb.transpose()) * coeff;
        }
        Ok(h)
    }
}

/// σ-max samples along the imaginary axis; a missing value marks a grid point
/// where `iω` hit a pole.
#[derive(Debug, Clone)]
pub struct FrequencySweep {
    pub omegas: Vec<f64>,
    pub values: Vec<Option<f64>>,
}

impl FrequencySweep {
    /// CSV with header `omega,sigma_max`, 12 significant digits, missing
    /// values as an empty field.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega,sigma_max\n");
        for (omega, value) in self.omegas.iter().zip(&self.values) {
            match value {
                Some(v) => out.push_str(&format!("{omega:.11e},{v:.11e}\n")),
                None => out.push_str(&format!("{omega:.11e},\n")),
            }
        }
        out
    }

    /// Indices of interior local maxima, ordered by decreasing σ-max.
    pub fn local_maxima(&self) -> Vec<usize> {
        let v: Vec<Option<f64>> = self.values.clone();
        let mut peaks: Vec<usize> = (0..v.len())
            .filter(|&k| {
                let Some(cur) = v[k] else { return false };
                let left_ok = k == 0 || v[k - 1].is_none_or(|x| cur > x);
                let right_ok = k + 1 == v.len() || v[k + 1].is_none_or(|x| cur > x);
                left_ok && right_ok
            })
            .collect();
        peaks.sort_by(|&a, &b| {
            v[b].unwrap_or(f64::NEG_INFINITY)
                .partial_cmp(&v[a].unwrap_or(f64::NEG_INFINITY))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        peaks
    }
}

/// Pointwise `σ_max(H(iω))` over a frequency grid. A singular shift at one
/// grid point is recorded as a missing value and the sweep continues.
pub fn frequency_sweep<T: TransferFunction + ?Sized>(
    tf: &T,
    omegas: &[f64],
) -> Result<FrequencySweep> {
    let mut values = Vec::with_capacity(omegas.len());
    for &omega in omegas {
        match tf.eval(Complex64::new(0.0, omega)) {
            Ok(h) => values.push(Some(kernels::sigma_max(&h)?)),
            Err(Error::SingularShift { .. }) => values.push(None),
            Err(other) => return Err(other),
        }
    }
    Ok(FrequencySweep {
        omegas: omegas.to_vec(),
        values,
    })
}

/// Log-spaced positive frequency grid with `ω = 0` prepended.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let mut grid = Vec::with_capacity(count + 1);
    grid.push(0.0);
    let (llo, lhi) = (lo.ln(), hi.ln());
    for k in 0..count {
        let t = k as f64 / (count - 1) as f64;
        grid.push((llo + t * (lhi - llo)).exp());
    }
    grid
}

/// Linear frequency grid over `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && hi >= lo);
    (0..count)
        .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
        .collect()
}

/// The diagnostic `f(s) = 1 / ||H(s)||_F^2`, defined away from the poles.
pub fn eval_f<T: TransferFunction + ?Sized>(tf: &T, s: Complex64) -> Result<f64> {
    let h = tf.eval(s)?;
    let norm_sq = h.norm_squared();
    Ok(1.0 / norm_sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::small_generalized_eig;
    use crate::sparse::SparseMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_lag() -> DescriptorSystem {
        // H(s) = 1 / (s + 1)
        let a = SparseMatrix::from_triplets(1, 1, &[(0, 0, c(-1.0, 0.0))]);
        let e = SparseMatrix::identity(1);
        let one = DMatrix::from_element(1, 1, c(1.0, 0.0));
        DescriptorSystem::new(a, e, one.clone(), one, DMatrix::zeros(1, 1)).unwrap()
    }

    fn diag_two_pole() -> DescriptorSystem {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, c(-1.0, 0.0)), (1, 1, c(-2.0, 0.0))]);
        let e = SparseMatrix::identity(2);
        let b = DMatrix::from_column_slice(2, 1, &[c(1.0, 0.0), c(1.0, 0.0)]);
        let cm = DMatrix::from_row_slice(1, 2, &[c(1.0, 0.0), c(1.0, 0.0)]);
        DescriptorSystem::new(a, e, b, cm, DMatrix::zeros(1, 1)).unwrap()
    }

    fn seeded_dense_system(n: usize, m: usize, p: usize, seed: u64) -> DescriptorSystem {
        let mut state = seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        // diagonally dominant stable A keeps the poles simple and away from
        // the sample points used in the tests
        let mut a_dense = DMatrix::from_fn(n, n, |_, _| c(0.3 * next(), 0.0));
        for i in 0..n {
            a_dense[(i, i)] = c(-(1.0 + i as f64 * 0.37) , 0.0);
        }
        let a = SparseMatrix::from_dense(&a_dense);
        let e = SparseMatrix::identity(n);
        let b = DMatrix::from_fn(n, m, |_, _| c(next(), 0.0));
        let cm = DMatrix::from_fn(p, n, |_, _| c(next(), 0.0));
        let d = DMatrix::from_fn(p, m, |_, _| c(0.1 * next(), 0.0));
        DescriptorSystem::new(a, e, b, cm, d).unwrap()
    }

    #[test]
    fn diagonal_transfer_value() {
        let sys = diag_two_pole();
        let h = eval_transfer(&sys, c(0.0, 0.0)).unwrap();
        assert!((h[(0, 0)] - c(1.5, 0.0)).norm() < 1e-14);
        assert!(matches!(
            eval_transfer(&sys, c(-1.0, 0.0)),
            Err(Error::SingularShift { .. })
        ));
    }

    /// Oracle: the partial-fraction expansion assembled from a dense
    /// eigendecomposition must reproduce the solve-based evaluation.
    #[test]
    fn transfer_matches_partial_fraction_sum() {
        let sys = seeded_dense_system(60, 2, 2, 3);
        let s = c(2.0, 3.0);
        let h = eval_transfer(&sys, s).unwrap();
        let dec = small_generalized_eig(&sys.a().to_dense(), &sys.e().to_dense()).unwrap();
        let mut sum = sys.d().clone();
        for (lambda, v, w) in dec.finite_triples() {
            let pd = pole_data_from_eigentriple(&sys, lambda, &v, &w).unwrap();
            sum += (&pd.cv * pd.wb.transpose()) / (s - lambda);
        }
        let rel = (&h - &sum).norm() / h.norm();
        assert!(rel < 1e-8, "partial fraction mismatch {rel}");
    }

    #[test]
    fn scalar_derivatives() {
        let sys = scalar_lag();
        let d1 = eval_transfer_derivative(&sys, c(0.0, 0.0), 1).unwrap();
        assert!((d1[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-14);
        let d2 = eval_transfer_derivative(&sys, c(0.0, 0.0), 2).unwrap();
        assert!((d2[(0, 0)] - c(2.0, 0.0)).norm() < 1e-14);
    }

    /// Oracle: central finite differences of the evaluation. The second
    /// difference uses a larger step because its rounding error grows like
    /// eps / h^2.
    #[test]
    fn derivatives_match_finite_differences() {
        let sys = seeded_dense_system(40, 2, 3, 11);
        let s = c(1.0, 1.0);
        let h1 = 1e-5;
        let hp = eval_transfer(&sys, s + c(h1, 0.0)).unwrap();
        let hm = eval_transfer(&sys, s - c(h1, 0.0)).unwrap();
        let d1 = eval_transfer_derivative(&sys, s, 1).unwrap();
        let fd1 = (&hp - &hm) / c(2.0 * h1, 0.0);
        assert!((&d1 - &fd1).norm() / d1.norm() < 1e-6);

        let h2 = 1e-4;
        let hp = eval_transfer(&sys, s + c(h2, 0.0)).unwrap();
        let hm = eval_transfer(&sys, s - c(h2, 0.0)).unwrap();
        let h0 = eval_transfer(&sys, s).unwrap();
        let d2 = eval_transfer_derivative(&sys, s, 2).unwrap();
        let fd2 = (&hp - &h0 * c(2.0, 0.0) + &hm) / c(h2 * h2, 0.0);
        assert!((&d2 - &fd2).norm() / d2.norm() < 1e-6);
    }

    fn synthetic_pole(lambda: Complex64, rp: f64) -> PoleData {
        let dominance = if lambda.re == 0.0 {
            f64::INFINITY
        } else {
            rp / lambda.re.abs()
        };
        PoleData {
            lambda,
            v: DVector::from_element(1, c(1.0, 0.0)),
            w: DVector::from_element(1, c(1.0, 0.0)),
            cv: DVector::from_element(1, c(rp, 0.0)),
            wb: DVector::from_element(1, c(1.0, 0.0)),
            residue_norm_product: rp,
            dominance,
        }
    }

    #[test]
    fn sort_prefers_small_real_part_and_axis_poles() {
        let sorted = dominance_sort(vec![
            synthetic_pole(c(-2.0, 0.0), 1.0),
            synthetic_pole(c(-1.0, 0.0), 1.0),
        ]);
        assert_eq!(sorted[0].lambda, c(-1.0, 0.0));
        let sorted = dominance_sort(vec![
            synthetic_pole(c(-1.0, 0.0), 5.0),
            synthetic_pole(c(0.0, 2.0), 0.1),
        ]);
        assert!(sorted[0].dominance.is_infinite());
        assert_eq!(sorted[0].lambda, c(0.0, 2.0));
    }

    /// Oracle: an independently written selection sort over the documented
    /// order must agree element-wise.
    #[test]
    fn sort_agrees_with_selection_oracle() {
        let mut state = 99u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let poles: Vec<PoleData> = (0..20)
            .map(|k| {
                let quantized = (next() * 4.0).floor() + 1.0; // force dominance ties
                let re = -((k % 5) as f64 * 0.5 + 0.5);
                let im = (next() * 10.0).floor() - 5.0;
                synthetic_pole(c(re, im), quantized * re.abs())
            })
            .collect();

        let mut remaining = poles.clone();
        let mut expected = Vec::new();
        while !remaining.is_empty() {
            let mut best = 0;
            for i in 1..remaining.len() {
                let a = &remaining[i];
                let b = &remaining[best];
                let better = a.dominance > b.dominance
                    || (a.dominance == b.dominance
                        && (a.lambda.re.abs() < b.lambda.re.abs()
                            || (a.lambda.re.abs() == b.lambda.re.abs()
                                && (a.lambda.norm() < b.lambda.norm()
                                    || (a.lambda.norm() == b.lambda.norm()
                                        && (a.lambda.re, a.lambda.im)
                                            < (b.lambda.re, b.lambda.im))))));
                if better {
                    best = i;
                }
            }
            expected.push(remaining.remove(best));
        }
        let sorted = dominance_sort(poles);
        for (got, want) in sorted.iter().zip(&expected) {
            assert_eq!(got.lambda, want.lambda);
            assert_eq!(got.dominance, want.dominance);
        }
    }

    #[test]
    fn pole_data_diagonal_and_scaling_invariance() {
        let sys = diag_two_pole();
        let e1 = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let pd = pole_data_from_eigentriple(&sys, c(-1.0, 0.0), &e1, &e1).unwrap();
        assert!((pd.residue_norm_product - 1.0).abs() < 1e-14);
        assert!((pd.dominance - 1.0).abs() < 1e-14);

        let v10 = &e1 * c(10.0, 0.0);
        let w3 = &e1 * c(0.0, 3.0);
        let pd2 = pole_data_from_eigentriple(&sys, c(-1.0, 0.0), &v10, &w3).unwrap();
        assert!((pd2.residue_norm_product - pd.residue_norm_product).abs() < 1e-12);
        assert!((pd2.dominance - pd.dominance).abs() < 1e-12);
    }

    #[test]
    fn degenerate_triple_is_rejected() {
        let sys = diag_two_pole();
        let e1 = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let e2 = DVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            pole_data_from_eigentriple(&sys, c(-1.0, 0.0), &e1, &e2),
            Err(Error::DegenerateEigenvector { .. })
        ));
    }

    #[test]
    fn modal_bound_trivial_cases() {
        assert_eq!(modal_error_bound(&[]).unwrap(), 0.0);
        let tail = [synthetic_pole(c(-2.0, 0.0), 1.0)];
        assert!((modal_error_bound(&tail).unwrap() - 0.5).abs() < 1e-14);
        let axis = [synthetic_pole(c(0.0, 1.0), 1.0)];
        assert!(matches!(
            modal_error_bound(&axis),
            Err(Error::UnboundedError { .. })
        ));
    }

    /// Oracle: sample the truncation error on a dense imaginary-axis grid and
    /// verify it never exceeds the bound.
    #[test]
    fn modal_bound_dominates_sampled_error() {
        let sys = seeded_dense_system(100, 2, 2, 5);
        let dec = small_generalized_eig(&sys.a().to_dense(), &sys.e().to_dense()).unwrap();
        let mut poles = Vec::new();
        for (lambda, v, w) in dec.finite_triples() {
            poles.push(pole_data_from_eigentriple(&sys, lambda, &v, &w).unwrap());
        }
        let poles = dominance_sort(poles);
        let (head, tail) = poles.split_at(5);
        let model = modal_reduce(head, sys.d().clone()).unwrap();
        let bound = modal_error_bound(tail).unwrap();
        for k in 0..2000 {
            let omega = -300.0 + k as f64 * 0.3;
            let h = eval_transfer(&sys, c(0.0, omega)).unwrap();
            let hr = model.eval(c(0.0, omega)).unwrap();
            let err = kernels::sigma_max(&(h - hr)).unwrap();
            assert!(
                err <= bound + 1e-10,
                "sampled error {err} exceeds bound {bound} at omega {omega}"
            );
        }
    }

    #[test]
    fn modal_model_evaluates_partial_fractions() {
        let sys = diag_two_pole();
        let dec = small_generalized_eig(&sys.a().to_dense(), &sys.e().to_dense()).unwrap();
        let mut poles = Vec::new();
        for (lambda, v, w) in dec.finite_triples() {
            poles.push(pole_data_from_eigentriple(&sys, lambda, &v, &w).unwrap());
        }
        let model = modal_reduce(&poles, sys.d().clone()).unwrap();
        for s in [c(0.5, 0.5), c(1.0, -2.0), c(0.0, 3.0)] {
            let h = eval_transfer(&sys, s).unwrap();
            let hm = model.eval(s).unwrap();
            assert!((h - hm).norm() < 1e-12);
        }
    }

    #[test]
    fn sweep_scalar_values() {
        let sys = scalar_lag();
        let sweep = frequency_sweep(&sys, &[0.0, 1.0]).unwrap();
        assert!((sweep.values[0].unwrap() - 1.0).abs() < 1e-14);
        assert!((sweep.values[1].unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        let csv = sweep.to_csv();
        assert!(csv.starts_with("omega,sigma_max\n"));
        assert_eq!(csv.lines().count(), 3);
    }

    /// Every sweep value must equal the eval + σ-max composition exactly.
    #[test]
    fn sweep_is_compositional() {
        let sys = seeded_dense_system(60, 3, 2, 21);
        let omegas: Vec<f64> = (0..100).map(|k| 0.05 * k as f64).collect();
        let sweep = frequency_sweep(&sys, &omegas).unwrap();
        for (k, &omega) in omegas.iter().enumerate() {
            let expected =
                kernels::sigma_max(&eval_transfer(&sys, c(0.0, omega)).unwrap()).unwrap();
            assert_eq!(sweep.values[k], Some(expected));
        }
    }

    #[test]
    fn sweep_records_singular_points_as_missing() {
        // pole exactly at s = i  =>  omega = 1 is a missing value
        let a = SparseMatrix::from_triplets(1, 1, &[(0, 0, c(0.0, 1.0))]);
        let e = SparseMatrix::identity(1);
        let one = DMatrix::from_element(1, 1, c(1.0, 0.0));
        let sys = DescriptorSystem::new(a, e, one.clone(), one, DMatrix::zeros(1, 1)).unwrap();
        let sweep = frequency_sweep(&sys, &[0.0, 1.0, 2.0]).unwrap();
        assert!(sweep.values[0].is_some());
        assert!(sweep.values[1].is_none());
        assert!(sweep.values[2].is_some());
        assert!(sweep.to_csv().lines().nth(2).unwrap().ends_with(','));
    }

    #[test]
    fn reciprocal_norm_diagnostic() {
        let sys = scalar_lag();
        assert!((eval_f(&sys, c(0.0, 0.0)).unwrap() - 1.0).abs() < 1e-14);
        assert!((eval_f(&sys, c(1.0, 0.0)).unwrap() - 4.0).abs() < 1e-14);

        let wide = seeded_dense_system(30, 2, 2, 8);
        let mut state = 17u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..20 {
            let s = c(next() * 4.0 + 5.0, next() * 4.0);
            let f = eval_f(&wide, s).unwrap();
            let h = eval_transfer(&wide, s).unwrap();
            assert!((f * h.norm_squared() - 1.0).abs() < 1e-12);
        }
    }
}
