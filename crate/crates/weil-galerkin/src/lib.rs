//! Arbitrary-precision Galerkin diagonalization of the truncated Weil
//! explicit-formula operator.
//!
//! The library builds the kernel function of the prime-truncated Weil
//! operator on `L²([0, L])` with `L = log c`, assembles its Galerkin matrix
//! in a Fourier basis, diagonalizes parity sectors with a Jacobi
//! eigensolver, extracts approximations to Riemann zeros from the
//! ground-state eigenvector, and provides the convergence, extrapolation,
//! and spectral-statistics analyses used to study how the approximation
//! sharpens as the prime cutoff grows.
//!
//! Modules, bottom-up:
//!
//! * [`mpkit`] — precision contexts and numeric primitives (complex
//!   digamma, stable phase integrals, sine/cosine integrals, tanh–sinh
//!   quadrature, root refinement).
//! * [`weil_kernel`] — the truncated kernel `ψ` and its derivative: prime,
//!   pole, and archimedean pieces, plus cached tabulation at Fourier
//!   lattice points.
//! * [`galerkin`] — matrix assembly, parity projection, Jacobi
//!   diagonalization, and spectral invariants.
//! * [`zeros`] — embedded high-precision reference zeros, the mode
//!   transform, and zero extraction from eigenvectors.
//! * [`analysis`] — sweep datasets, model fitting, Aitken extrapolation,
//!   overlaps, PCA, unfolding and spacing statistics, and the closed-form
//!   ground-state size predictor.
//! * [`cli`] — the thin command-line front end (`cell`, `sweep`, `zeros`,
//!   `analyze`, `predict`) and its JSON record types.

pub mod error;
pub mod galerkin;
pub mod mpkit;
pub mod weil_kernel;
pub mod zeros;

pub use error::{Error, Result};
