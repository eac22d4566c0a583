//! Seeded generation of real, sparse, stable descriptor systems with a
//! prescribed spectrum.
//!
//! The state matrix is assembled from 1x1 blocks (real poles) and 2x2
//! rotation blocks `[a  b; -b  a]` (conjugate pole pairs `a ± bi`), so the
//! exact pole set is known by construction. Per-block input/output coupling
//! scales shape the dominance ordering: strongly coupled "placed" poles
//! dominate the weakly coupled background filler.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use super::DescriptorSystem;
use crate::sparse::SparseMatrix;
use crate::{Error, Result};

/// Spectrum recipe for [`generate_random_system`].
#[derive(Debug, Clone)]
pub struct SpectrumRecipe {
    /// Poles placed exactly. Entries with nonzero imaginary part stand for a
    /// conjugate pair and consume two states; real entries consume one.
    pub placed: Vec<Complex64>,
    /// Coupling scale for the placed blocks.
    pub placed_coupling: f64,
    /// Per-placed-pole geometric decay of the coupling, sharpening the
    /// dominance ordering (pole `k` is scaled by `decay^k`).
    pub placed_decay: f64,
    /// Real parts of background poles are drawn from `-[lo, hi]`.
    pub background_real: (f64, f64),
    /// Imaginary parts of background pairs are drawn from `[lo, hi]`.
    pub background_imag: (f64, f64),
    /// Coupling scale for the background blocks.
    pub background_coupling: f64,
    /// Draw per-block `E` diagonal values from this range instead of using
    /// the identity. Placement stays exact: the block rows of `A` are scaled
    /// together with `E`.
    pub diagonal_e: Option<(f64, f64)>,
    /// Use all-ones `B` and `C` instead of random entries.
    pub ones_coupling: bool,
}

impl Default for SpectrumRecipe {
    fn default() -> Self {
        SpectrumRecipe {
            placed: Vec::new(),
            placed_coupling: 1.0,
            placed_decay: 1.0,
            background_real: (2.0, 40.0),
            background_imag: (0.0, 200.0),
            background_coupling: 0.05,
            diagonal_e: None,
            ones_coupling: false,
        }
    }
}

struct Block {
    /// 1 or 2 states
    size: usize,
    re: f64,
    im: f64,
    coupling: f64,
}

fn uniform(rng: &mut ChaCha12Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn uniform_in(rng: &mut ChaCha12Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform(rng)
}

/// Generate a real, sparse, asymptotically stable system with simple finite
/// poles placed by `recipe`. Deterministic in `seed`.
pub fn generate_random_system(
    n: usize,
    m: usize,
    p: usize,
    seed: u64,
    recipe: &SpectrumRecipe,
) -> Result<DescriptorSystem> {
    if m < 1 || p < 1 || n < m.max(p) {
        return Err(Error::InvalidSpec(format!(
            "need n >= max(m, p) >= 1, got n = {n}, m = {m}, p = {p}"
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);

    let mut blocks = Vec::new();
    let mut states = 0usize;
    for (k, pole) in recipe.placed.iter().enumerate() {
        if pole.re >= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "placed pole {pole} is not in the open left half-plane"
            )));
        }
        let size = if pole.im == 0.0 { 1 } else { 2 };
        states += size;
        blocks.push(Block {
            size,
            re: pole.re,
            im: pole.im.abs(),
            coupling: recipe.placed_coupling * recipe.placed_decay.powi(k as i32),
        });
    }
    if states > n {
        return Err(Error::InvalidSpec(format!(
            "recipe places {states} states but n = {n}"
        )));
    }

    // fill the remaining states with weakly coupled background poles
    let (re_lo, re_hi) = recipe.background_real;
    let (im_lo, im_hi) = recipe.background_imag;
    while states < n {
        let re = -uniform_in(&mut rng, re_lo, re_hi).abs().max(1e-3);
        let want_pair = n - states >= 2 && uniform(&mut rng) < 0.7;
        let size = if want_pair { 2 } else { 1 };
        let im = if want_pair {
            uniform_in(&mut rng, im_lo, im_hi).abs().max(1e-3)
        } else {
            0.0
        };
        states += size;
        blocks.push(Block {
            size,
            re,
            im,
            coupling: recipe.background_coupling,
        });
    }

    let mut a_triplets = Vec::with_capacity(2 * n);
    let mut e_triplets = Vec::with_capacity(n);
    let mut row_scales = vec![0.0f64; n];
    let mut offset = 0usize;
    for block in &blocks {
        let d = match recipe.diagonal_e {
            Some((lo, hi)) => uniform_in(&mut rng, lo.max(1e-6), hi).abs(),
            None => 1.0,
        };
        match block.size {
            1 => {
                a_triplets.push((offset, offset, Complex64::new(d * block.re, 0.0)));
                e_triplets.push((offset, offset, Complex64::new(d, 0.0)));
                row_scales[offset] = block.coupling;
            }
            2 => {
                let (a, b) = (d * block.re, d * block.im);
                a_triplets.push((offset, offset, Complex64::new(a, 0.0)));
                a_triplets.push((offset, offset + 1, Complex64::new(b, 0.0)));
                a_triplets.push((offset + 1, offset, Complex64::new(-b, 0.0)));
                a_triplets.push((offset + 1, offset + 1, Complex64::new(a, 0.0)));
                e_triplets.push((offset, offset, Complex64::new(d, 0.0)));
                e_triplets.push((offset + 1, offset + 1, Complex64::new(d, 0.0)));
                row_scales[offset] = block.coupling;
                row_scales[offset + 1] = block.coupling;
            }
            _ => unreachable!(),
        }
        offset += block.size;
    }

    let a = SparseMatrix::from_triplets(n, n, &a_triplets);
    let e = SparseMatrix::from_triplets(n, n, &e_triplets);

    let mut entry = |scale: f64| -> Complex64 {
        let v = if recipe.ones_coupling {
            1.0
        } else {
            // keep magnitudes bounded away from zero so couplings never vanish
            let u = uniform(&mut rng);
            let sign = if uniform(&mut rng) < 0.5 { -1.0 } else { 1.0 };
            sign * (0.3 + 0.7 * u)
        };
        Complex64::new(scale * v, 0.0)
    };
    let b = DMatrix::from_fn(n, m, |i, _| entry(row_scales[i]));
    let c = DMatrix::from_fn(p, n, |_, j| entry(row_scales[j]));
    let d = DMatrix::zeros(p, m);

    DescriptorSystem::new(a, e, b, c, d)
}
