//! Dominant-pole estimation for large-scale descriptor systems.
//!
//! A descriptor system
//!
//! ```text
//! E x'(t) = A x(t) + B u(t),        y(t) = C x(t) + D u(t)
//! ```
//!
//! with sparse `A`, `E` has the transfer function `H(s) = C (sE - A)^{-1} B + D`.
//! Its poles are the finite eigenvalues of the pencil `A - sE`; the *dominant*
//! ones are those maximizing `||C v|| ||w* B|| / |Re λ|` under the normalization
//! `w* E v = 1`, i.e. the poles responsible for the large peaks of
//! `σ_max(H(iω))` along the imaginary axis.
//!
//! This crate computes a prescribed number of dominant poles by an interpolatory
//! two-sided projection iteration: the system is projected onto a pair of
//! equal-dimension subspaces, the dominant poles of the small projected system
//! are computed by dense QZ, and the subspaces are expanded so that the
//! projected transfer function Hermite-interpolates `H` at those pole estimates.
//! See [`framework::solve`] for the main entry point.
//!
//! Module layout:
//! - [`kernels`]: shifted sparse/dense LU with adjoint solves, small dense
//!   generalized eigensolver, σ-max, orthonormal basis extension;
//! - [`system`]: the descriptor-system data model, Matrix Market I/O, and a
//!   seeded generator with prescribed spectra;
//! - [`transfer`]: transfer-function evaluation, derivatives, dominance
//!   metrics, modal reduced models, frequency sweeps;
//! - [`framework`]: the subspace iteration itself, plus a dense-eigendecomposition
//!   oracle and convergence-rate diagnostics.

use openblas_src as _;

pub mod counters;
mod error;
pub mod framework;
pub mod kernels;
pub mod sparse;
pub mod system;
pub mod transfer;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
