//! The interpolatory subspace iteration for dominant poles.
//!
//! Each pass projects the system onto a pair of equal-dimension orthonormal
//! bases `V`, `W`, computes the dominant poles of the small projected pencil
//! `(W^H A V, W^H E V)` by dense QZ, and terminates once the residuals
//! `||(A - λE) V v||_inf` of all sought estimates fall under the tolerance.
//! Otherwise both bases are extended at every non-converged estimate `μ` with
//! the chained solve directions
//!
//! ```text
//! V += [(A - μE)^{-1} B P_R,  (A - μE)^{-1} E (…),  …]      (q + 1 blocks)
//! W += [(A - μE)^{-H} C^H P_L, (A - μE)^{-H} E^H (…), …]
//! ```
//!
//! where `P_R = I` if `m <= p` and `H(μ)^H` otherwise, `P_L = I` if `p <= m`
//! and `H(μ)` otherwise. After the extension the projected transfer function
//! matches `H` and its first `q` derivatives at `μ` (and the `P_L^H · P_R`
//! compressions of derivatives `q+1 … 2q+1`), which is what drives the
//! locally quadratic convergence of the pole estimates.
//!
//! One LU factorization of `A - μE` serves all solves of an expansion, so an
//! expansion costs one LU plus `(q+1) min(m, p)` substitutions per side; the
//! projector matrices `P_R`/`P_L` are byproducts of those same solves.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::kernels::{
    small_generalized_eig, small_generalized_eig_with_limit, DenseLu, OrthonormalBasis,
};
use crate::system::DescriptorSystem;
use crate::transfer::{
    dominance_sort, frequency_sweep, log_grid, pole_data_from_dense_triple,
    pole_data_from_eigentriple, PoleData, TransferFunction,
};
use crate::{Error, Result};

/// Poles treated as real when `|Im λ|` is below this relative threshold, so
/// that rounding noise cannot flip a real pole out of the nonpositive
/// half-plane filter.
const REAL_AXIS_TOL: f64 = 1e-10;

/// Solver parameters. `Default` gives the standard settings: one pole,
/// first-derivative interpolation, residual tolerance `1e-7`.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Number of dominant poles sought.
    pub kappa: usize,
    /// Interpolation parameter: how many chained derivative directions are
    /// added per point. Rectangular systems warrant `q >= 2` for the full
    /// matching order, but `q = 1` works well in practice; `strict_q`
    /// escalates the warning to an error.
    pub q: usize,
    /// Residual tolerance on `||(A - λE) V v||_inf`.
    pub tol: f64,
    /// Maximum number of subspace passes.
    pub max_iter: usize,
    /// Explicit interpolation points for the initial bases; when absent the
    /// two-phase bootstrap below is used.
    pub init_points: Option<Vec<Complex64>>,
    /// Number of seed dominant poles interpolated by the bootstrap.
    pub init_count: usize,
    /// Hard cap on the subspace dimension; exceeded means a non-converged
    /// return (there is no restart strategy).
    pub max_subspace_dim: usize,
    /// Track only poles with nonpositive imaginary part, exploiting the
    /// conjugate symmetry of real-coefficient systems.
    pub real_mode: bool,
    /// Error out instead of warning when `m != p` and `q < 2`.
    pub strict_q: bool,
    /// One-sided variant (`W = V`); accepted as a flag but not implemented.
    pub one_sided: bool,
    /// `(lo, hi, count)` of the log-spaced σ-max sweep used by the bootstrap.
    pub init_grid: (f64, f64, usize),
    /// Number of sweep peaks the bootstrap interpolates in its first phase.
    pub init_peaks: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            kappa: 1,
            q: 1,
            tol: 1e-7,
            max_iter: 30,
            init_points: None,
            init_count: 10,
            max_subspace_dim: 600,
            real_mode: false,
            strict_q: false,
            one_sided: false,
            init_grid: (1e-2, 1e4, 33),
            init_peaks: 6,
        }
    }
}

impl SolverConfig {
    /// Check the configuration against a system's dimensions.
    pub fn validate(&self, system: &DescriptorSystem) -> Result<()> {
        if self.kappa == 0 {
            return Err(Error::InvalidConfig("kappa must be at least 1".into()));
        }
        if self.tol.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidConfig("tol must be positive".into()));
        }
        if self.q == 0 {
            return Err(Error::InvalidConfig("q must be at least 1".into()));
        }
        if self.one_sided {
            return Err(Error::InvalidConfig(
                "the one-sided variant (W = V) is not implemented".into(),
            ));
        }
        let (m, p) = (system.num_inputs(), system.num_outputs());
        if m != p && self.q < 2 {
            if self.strict_q {
                return Err(Error::InvalidConfig(format!(
                    "rectangular system (m = {m}, p = {p}) requires q >= 2 in strict mode"
                )));
            }
            log::warn!(
                "rectangular system (m = {m}, p = {p}) with q = {}: derivative matching \
                 is partial, convergence is usually still fast",
                self.q
            );
        }
        if self.real_mode && !system.is_real() {
            log::warn!("real_mode requested on a system with complex entries");
        }
        Ok(())
    }
}

/// The two orthonormal bases of a Petrov-Galerkin reduction. Their dimensions
/// always match, so the projected pencil stays square.
#[derive(Debug, Clone)]
pub struct ProjectionPair {
    v: OrthonormalBasis,
    w: OrthonormalBasis,
}

impl ProjectionPair {
    pub fn empty(ambient_dim: usize) -> Self {
        ProjectionPair {
            v: OrthonormalBasis::empty(ambient_dim),
            w: OrthonormalBasis::empty(ambient_dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.v.dim()
    }

    pub fn v(&self) -> &OrthonormalBasis {
        &self.v
    }

    pub fn w(&self) -> &OrthonormalBasis {
        &self.w
    }

    /// Extend both bases by paired columns. A column pair is admitted only if
    /// both sides survive the rank guard, which keeps the dimensions equal.
    /// Returns the number of admitted pairs.
    pub fn extend_pair(
        &mut self,
        v_cols: &DMatrix<Complex64>,
        w_cols: &DMatrix<Complex64>,
    ) -> usize {
        assert_eq!(v_cols.ncols(), w_cols.ncols(), "paired blocks must match");
        let mut admitted = 0;
        for k in 0..v_cols.ncols() {
            let vc = DVector::from(v_cols.column(k).clone_owned());
            let wc = DVector::from(w_cols.column(k).clone_owned());
            let (rv, nv) = self.v.orthogonal_residual(&vc);
            let (rw, nw) = self.w.orthogonal_residual(&wc);
            let (rvn, rwn) = (rv.norm(), rw.norm());
            if OrthonormalBasis::admits(rvn, nv) && OrthonormalBasis::admits(rwn, nw) {
                self.v.push_unit(&(rv / Complex64::new(rvn, 0.0)));
                self.w.push_unit(&(rw / Complex64::new(rwn, 0.0)));
                admitted += 1;
            }
        }
        admitted
    }
}

/// The projected system `(W^H A V, W^H E V, W^H B, C V, D)`.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub a_r: DMatrix<Complex64>,
    pub e_r: DMatrix<Complex64>,
    pub b_r: DMatrix<Complex64>,
    pub c_r: DMatrix<Complex64>,
    pub d: DMatrix<Complex64>,
}

impl ReducedSystem {
    /// Project the full system through the pair; recomputed from scratch so
    /// the blocks exactly equal the projected matrices.
    pub fn project(system: &DescriptorSystem, pair: &ProjectionPair) -> Self {
        let v = pair.v().columns();
        let w = pair.w().columns();
        let av = system.a().mul_dense(v);
        let ev = system.e().mul_dense(v);
        ReducedSystem {
            a_r: w.adjoint() * av,
            e_r: w.adjoint() * ev,
            b_r: w.adjoint() * system.b(),
            c_r: system.c() * v,
            d: system.d().clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.a_r.nrows()
    }

    fn shifted_lu(&self, s: Complex64) -> Result<DenseLu> {
        let m = &self.a_r - &self.e_r * s;
        let scale = m.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let lu = DenseLu::factor(m)?;
        let tol = (self.dim() as f64) * f64::EPSILON * scale;
        if scale == 0.0 || lu.zero_pivot() || lu.min_pivot() <= tol {
            return Err(Error::SingularShift { shift: s });
        }
        Ok(lu)
    }
}

impl TransferFunction for ReducedSystem {
    fn num_inputs(&self) -> usize {
        self.b_r.ncols()
    }

    fn num_outputs(&self) -> usize {
        self.c_r.nrows()
    }

    fn eval(&self, s: Complex64) -> Result<DMatrix<Complex64>> {
        let lu = self.shifted_lu(s)?;
        let x = lu.solve(&self.b_r, false)?;
        Ok(&self.d - &self.c_r * x)
    }

    fn eval_derivative(&self, s: Complex64, j: usize) -> Result<DMatrix<Complex64>> {
        if j == 0 {
            return self.eval(s);
        }
        let lu = self.shifted_lu(s)?;
        let mut x = lu.solve(&self.b_r, false)?;
        for _ in 0..j {
            x = lu.solve(&(&self.e_r * x), false)?;
        }
        let jf: f64 = (1..=j).map(|k| k as f64).product();
        Ok(-(&self.c_r * x) * Complex64::new(jf, 0.0))
    }
}

/// One pass of a pole estimate's trajectory.
#[derive(Debug, Clone)]
pub struct HistoryEntry {
    pub iteration: usize,
    pub lambda: Complex64,
    pub residual: f64,
}

/// A dominant-pole estimate with its lifted eigenvector and residual history.
#[derive(Debug, Clone)]
pub struct PoleEstimate {
    pub lambda: Complex64,
    pub dominance: f64,
    /// Reduced-space right eigenvector, unit 2-norm.
    pub v_reduced: DVector<Complex64>,
    /// `V v_reduced`, the eigenvector estimate in the full space.
    pub v_lifted: DVector<Complex64>,
    /// `||(A - λE) v_lifted||_inf`.
    pub residual: f64,
    pub converged: bool,
    pub history: Vec<HistoryEntry>,
}

/// Counters, residual tables, and timings of one solver run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub iterations: usize,
    pub lu_count: u64,
    pub solve_count: u64,
    pub final_subspace_dim: usize,
    /// Residuals of the sorted estimates, one row per pass.
    pub per_iteration: Vec<Vec<f64>>,
    /// Number of estimates expanded at after each pass.
    pub expanded_per_iteration: Vec<usize>,
    /// Subspace dimension at the start of each pass.
    pub dim_per_iteration: Vec<usize>,
    pub init_time_s: Option<f64>,
    pub solve_time_s: Option<f64>,
    pub converged: bool,
    pub warnings: Vec<String>,
}

/// Everything a run produces: the estimates, the report, and the final
/// projection state (useful for reduced-model sweeps and diagnostics).
#[derive(Debug)]
pub struct SolveOutcome {
    pub estimates: Vec<PoleEstimate>,
    pub report: RunReport,
    pub pair: ProjectionPair,
    pub reduced: ReducedSystem,
}

fn inf_norm(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// The paired expansion directions for Hermite interpolation at `μ`:
/// `V_new = [X_0 … X_q]`, `X_0 = (A - μE)^{-1} B P_R(μ)`,
/// `X_r = (A - μE)^{-1} E X_{r-1}`, and the adjoint chain for `W_new` seeded
/// with `(A - μE)^{-H} C^H P_L(μ)`. Exactly one factorization of `A - μE` is
/// used for all solves; when `m != p` the transfer value needed for
/// `P_R`/`P_L` is read off the seed solve of the wide side, so the solve
/// count stays at `(q + 1) min(m, p)` per side.
pub fn expansion_block(
    system: &DescriptorSystem,
    mu: Complex64,
    q: usize,
) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    let f = system.factor_at(mu)?;
    let (m, p) = (system.num_inputs(), system.num_outputs());
    let c_adj = system.c().adjoint();
    let (x0, w0) = match m.cmp(&p) {
        std::cmp::Ordering::Equal => {
            let x0 = f.solve(system.b())?;
            let w0 = f.solve_adjoint(&c_adj)?;
            (x0, w0)
        }
        std::cmp::Ordering::Greater => {
            // m > p: P_R = H(μ)^H, P_L = I. The adjoint seed gives
            // Y = (A - μE)^{-H} C^H, and H(μ) = D - Y^H B costs no extra solve.
            let y = f.solve_adjoint(&c_adj)?;
            let h = system.d() - y.adjoint() * system.b();
            let x0 = f.solve(&(system.b() * h.adjoint()))?;
            (x0, y)
        }
        std::cmp::Ordering::Less => {
            // m < p: P_R = I, P_L = H(μ), with H(μ) read off the forward seed.
            let x0 = f.solve(system.b())?;
            let h = system.d() - system.c() * &x0;
            let w0 = f.solve_adjoint(&(c_adj * h))?;
            (x0, w0)
        }
    };

    let k = m.min(p);
    let n = system.order();
    debug_assert_eq!(x0.ncols(), k);
    debug_assert_eq!(w0.ncols(), k);
    let mut v_block = DMatrix::zeros(n, (q + 1) * k);
    let mut w_block = DMatrix::zeros(n, (q + 1) * k);
    v_block.view_mut((0, 0), (n, k)).copy_from(&x0);
    w_block.view_mut((0, 0), (n, k)).copy_from(&w0);
    let mut xc = x0;
    let mut wc = w0;
    for r in 1..=q {
        xc = f.solve(&system.e().mul_dense(&xc))?;
        wc = f.solve_adjoint(&system.e().mul_dense_adjoint(&wc))?;
        v_block.view_mut((0, r * k), (n, k)).copy_from(&xc);
        w_block.view_mut((0, r * k), (n, k)).copy_from(&wc);
    }
    Ok((v_block, w_block))
}

fn expansion_block_with_retry(
    system: &DescriptorSystem,
    mu: Complex64,
    q: usize,
) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    match expansion_block(system, mu, q) {
        Err(Error::SingularShift { .. }) => {
            let perturbed = mu + Complex64::new(1e-8 * (1.0 + mu.norm()), 0.0);
            log::warn!("shift {mu} is numerically a pole; retrying at {perturbed}");
            expansion_block(system, perturbed, q)
        }
        other => other,
    }
}

/// Build a fresh projection pair that Hermite-interpolates at the given
/// points, together with its projected system.
pub fn interpolatory_pair(
    system: &DescriptorSystem,
    points: &[Complex64],
    q: usize,
) -> Result<(ProjectionPair, ReducedSystem)> {
    let mut pair = ProjectionPair::empty(system.order());
    for &mu in points {
        let (vb, wb) = expansion_block_with_retry(system, mu, q)?;
        pair.extend_pair(&vb, &wb);
    }
    let reduced = ReducedSystem::project(system, &pair);
    Ok((pair, reduced))
}

/// Dominant poles of a projected system: all finite eigenvalues of the small
/// pencil, converted to [`PoleData`] on the reduced matrices, dominance
/// sorted, with only nonpositive imaginary parts retained in real mode, and
/// truncated to the top `kappa`. Fewer than `kappa` poles are returned when
/// the pencil has fewer qualifying eigenvalues.
pub fn reduced_dominant_poles(
    reduced: &ReducedSystem,
    kappa: usize,
    real_mode: bool,
) -> Result<Vec<PoleData>> {
    let dec = small_generalized_eig(&reduced.a_r, &reduced.e_r)?;
    let mut poles = Vec::new();
    for (lambda, v, w) in dec.finite_triples() {
        match pole_data_from_dense_triple(&reduced.e_r, &reduced.b_r, &reduced.c_r, lambda, &v, &w)
        {
            Ok(pd) => poles.push(pd),
            Err(Error::DegenerateEigenvector { lambda, magnitude }) => {
                log::debug!("skipping near-defective reduced eigenvalue {lambda} (|w^H E v| = {magnitude:.2e})");
            }
            Err(other) => return Err(other),
        }
    }
    let mut poles = dominance_sort(poles);
    if real_mode {
        poles.retain(|p| p.lambda.im <= REAL_AXIS_TOL * (1.0 + p.lambda.norm()));
    }
    poles.truncate(kappa);
    Ok(poles)
}

/// Outcome of [`initialize`]: the starting pair and the interpolation points
/// that produced it.
#[derive(Debug)]
pub struct InitOutcome {
    pub pair: ProjectionPair,
    pub reduced: ReducedSystem,
    pub points: Vec<Complex64>,
}

fn dedup_points(points: &mut Vec<Complex64>) {
    let mut kept: Vec<Complex64> = Vec::new();
    points.retain(|&p| {
        let dup = kept
            .iter()
            .any(|&k| (k - p).norm() < 1e-8 * (1.0 + p.norm()));
        if !dup {
            kept.push(p);
        }
        !dup
    });
}

/// Form the initial subspaces.
///
/// With explicit `init_points` the pair interpolates exactly there. Otherwise
/// a two-phase bootstrap runs: a log-spaced σ-max sweep locates the largest
/// peaks of `σ_max(H(iω))`, a seed reduction interpolates at those `iω_k`,
/// and the `init_count` most dominant poles of the seed reduction become the
/// interpolation points of the returned pair.
pub fn initialize(system: &DescriptorSystem, config: &SolverConfig) -> Result<InitOutcome> {
    config.validate(system)?;
    let mut points = match &config.init_points {
        Some(pts) => {
            if pts.is_empty() {
                return Err(Error::InitFailure("init_points is empty".into()));
            }
            pts.clone()
        }
        None => {
            let (lo, hi, count) = config.init_grid;
            let grid = log_grid(lo, hi, count);
            let sweep = frequency_sweep(system, &grid)?;
            let mut peaks = sweep.local_maxima();
            peaks.truncate(config.init_peaks.max(1));
            if peaks.is_empty() {
                return Err(Error::InitFailure(
                    "the σ-max sweep produced no usable peaks".into(),
                ));
            }
            let peak_points: Vec<Complex64> = peaks
                .iter()
                .map(|&k| Complex64::new(0.0, sweep.omegas[k]))
                .collect();
            let (_, seed_reduced) = interpolatory_pair(system, &peak_points, config.q)?;
            let seed_poles =
                reduced_dominant_poles(&seed_reduced, config.init_count, config.real_mode)?;
            if seed_poles.is_empty() {
                return Err(Error::InitFailure(
                    "the seed reduction has no finite poles".into(),
                ));
            }
            seed_poles.iter().map(|p| p.lambda).collect()
        }
    };
    dedup_points(&mut points);
    let (pair, reduced) = interpolatory_pair(system, &points, config.q)?;
    if pair.dim() == 0 {
        return Err(Error::InitFailure(
            "no independent directions were admitted into the initial subspaces".into(),
        ));
    }
    Ok(InitOutcome {
        pair,
        reduced,
        points,
    })
}

/// Estimates of one pass, sorted by dominance, with lifted vectors, residuals
/// and histories carried over from the previous pass by nearest-neighbor
/// matching in the complex plane.
fn build_estimates(
    system: &DescriptorSystem,
    pair: &ProjectionPair,
    reduced: &ReducedSystem,
    config: &SolverConfig,
    previous: &[PoleEstimate],
    iteration: usize,
) -> Result<Vec<PoleEstimate>> {
    let poles = reduced_dominant_poles(reduced, config.kappa, config.real_mode)?;
    let v_mat = pair.v().columns();
    let mut claimed = vec![false; previous.len()];
    let mut estimates = Vec::with_capacity(poles.len());
    for pd in poles {
        let mut v_reduced = pd.v.clone();
        let norm = v_reduced.norm();
        if norm > 0.0 {
            v_reduced /= Complex64::new(norm, 0.0);
        }
        let v_lifted = v_mat * &v_reduced;
        let residual = {
            let av = system.a().mul_vec(&v_lifted);
            let ev = system.e().mul_vec(&v_lifted);
            inf_norm(&(av - ev * pd.lambda))
        };
        // greedy nearest-neighbor match to carry histories across passes
        let mut history = previous
            .iter()
            .enumerate()
            .filter(|(k, _)| !claimed[*k])
            .min_by(|(_, a), (_, b)| {
                let da = (a.lambda - pd.lambda).norm();
                let db = (b.lambda - pd.lambda).norm();
                da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
            })
            .map(|(k, e)| {
                claimed[k] = true;
                e.history.clone()
            })
            .unwrap_or_default();
        history.push(HistoryEntry {
            iteration,
            lambda: pd.lambda,
            residual,
        });
        estimates.push(PoleEstimate {
            lambda: pd.lambda,
            dominance: pd.dominance,
            v_reduced,
            v_lifted,
            residual,
            converged: residual < config.tol,
            history,
        });
    }
    Ok(estimates)
}

fn duplicate_warnings(estimates: &[PoleEstimate]) -> Vec<String> {
    let mut warnings = Vec::new();
    for i in 0..estimates.len() {
        for j in i + 1..estimates.len() {
            let a = estimates[i].lambda;
            let b = estimates[j].lambda;
            if (a - b).norm() < 1e-8 * (1.0 + a.norm()) {
                let msg = format!("estimates {i} and {j} coincide at {a}; not deflated");
                log::warn!("{msg}");
                warnings.push(msg);
            }
        }
    }
    warnings
}

/// Run the subspace iteration: initialize, then per pass compute the reduced
/// dominant poles, stop when every sought estimate has residual below `tol`,
/// and otherwise expand at exactly the non-converged estimates. Converged
/// estimates are never expanded again. Exhausting `max_iter` or the subspace
/// cap returns the best current estimates flagged non-converged; those soft
/// failures are reported through `report.converged`, not an error.
pub fn solve(system: &DescriptorSystem, config: &SolverConfig) -> Result<SolveOutcome> {
    config.validate(system)?;
    let counters_start = system.counters().snapshot();
    let t0 = Instant::now();
    let init = initialize(system, config)?;
    let init_time = t0.elapsed().as_secs_f64();

    let mut pair = init.pair;
    let mut reduced = init.reduced;
    let mut estimates: Vec<PoleEstimate> = Vec::new();
    let mut per_iteration = Vec::new();
    let mut expanded_per_iteration = Vec::new();
    let mut dim_per_iteration = Vec::new();
    let mut warnings = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    if config.max_iter == 0 {
        // no pass runs; estimates from the initial reduction are reported for
        // observability, but the run counts as non-converged
        estimates = build_estimates(system, &pair, &reduced, config, &[], 0)?;
    }

    for pass in 1..=config.max_iter {
        iterations = pass;
        dim_per_iteration.push(pair.dim());
        estimates = build_estimates(system, &pair, &reduced, config, &estimates, pass)?;
        per_iteration.push(estimates.iter().map(|e| e.residual).collect::<Vec<_>>());
        warnings.extend(duplicate_warnings(&estimates));

        if estimates.is_empty() {
            warnings.push("the reduced system has no qualifying poles".into());
            expanded_per_iteration.push(0);
            break;
        }
        if estimates.iter().all(|e| e.converged) {
            if estimates.len() < config.kappa {
                warnings.push(format!(
                    "only {} of {} requested poles are available",
                    estimates.len(),
                    config.kappa
                ));
            }
            converged = true;
            expanded_per_iteration.push(0);
            break;
        }
        if pass == config.max_iter {
            warnings.push(format!("not converged after {} passes", config.max_iter));
            expanded_per_iteration.push(0);
            break;
        }
        if pair.dim() >= config.max_subspace_dim {
            warnings.push(format!(
                "subspace dimension {} reached the cap {}",
                pair.dim(),
                config.max_subspace_dim
            ));
            expanded_per_iteration.push(0);
            break;
        }

        let mut expanded = 0;
        for est in estimates.iter().filter(|e| !e.converged) {
            let (vb, wb) = expansion_block_with_retry(system, est.lambda, config.q)?;
            pair.extend_pair(&vb, &wb);
            expanded += 1;
        }
        expanded_per_iteration.push(expanded);
        reduced = ReducedSystem::project(system, &pair);
    }

    let counters = system.counters().snapshot().since(counters_start);
    let report = RunReport {
        iterations,
        lu_count: counters.lu_count,
        solve_count: counters.solve_count,
        final_subspace_dim: pair.dim(),
        per_iteration,
        expanded_per_iteration,
        dim_per_iteration,
        init_time_s: Some(init_time),
        solve_time_s: Some(t0.elapsed().as_secs_f64()),
        converged,
        warnings,
    };
    Ok(SolveOutcome {
        estimates,
        report,
        pair,
        reduced,
    })
}

/// Ground-truth dominant poles by a full dense generalized
/// eigendecomposition; only for systems up to `dense_limit`.
pub fn oracle_dominant_poles(
    system: &DescriptorSystem,
    kappa: usize,
    real_mode: bool,
    dense_limit: usize,
) -> Result<Vec<PoleData>> {
    let n = system.order();
    if n > dense_limit {
        return Err(Error::TooLarge {
            dim: n,
            limit: dense_limit,
        });
    }
    let dec =
        small_generalized_eig_with_limit(&system.a().to_dense(), &system.e().to_dense(), dense_limit)?;
    let mut poles = Vec::new();
    for (lambda, v, w) in dec.finite_triples() {
        match pole_data_from_eigentriple(system, lambda, &v, &w) {
            Ok(pd) => poles.push(pd),
            Err(Error::DegenerateEigenvector { lambda, magnitude }) => {
                log::warn!("oracle skips near-defective eigenvalue {lambda} (|w^H E v| = {magnitude:.2e})");
            }
            Err(other) => return Err(other),
        }
    }
    let mut poles = dominance_sort(poles);
    if real_mode {
        poles.retain(|p| p.lambda.im <= REAL_AXIS_TOL * (1.0 + p.lambda.norm()));
    }
    poles.truncate(kappa);
    Ok(poles)
}

/// Errors `e_k = |λ_k - λ*|` along a history and the quadratic ratios
/// `e_{k+1} / e_k^2`, for empirical convergence-rate checks.
pub fn convergence_rate_report(
    history: &[HistoryEntry],
    lambda_star: Complex64,
) -> Vec<(f64, f64)> {
    let errors: Vec<f64> = history
        .iter()
        .map(|h| (h.lambda - lambda_star).norm())
        .collect();
    errors
        .windows(2)
        .map(|w| {
            let ratio = if w[0] == 0.0 { 0.0 } else { w[1] / (w[0] * w[0]) };
            (w[0], ratio)
        })
        .collect()
}
