//! Sampling of linear SDEs with additive noise (multidimensional
//! Ornstein-Uhlenbeck processes) by truncated Karhunen-Loeve expansion of the
//! driving noise, evaluated through trigonometric matrix functions.
//!
//! The crate is organized as a stack:
//!
//! * [`matkit`] — dense linear-algebra kernels (matrix exponential, real Schur
//!   decomposition, Sylvester solver, field-of-values queries),
//! * [`phifn`] — the trigonometric phi functions of scalar and matrix
//!   arguments together with their norm bounds,
//! * [`klprocess`] — Karhunen-Loeve bases (Wiener process, Brownian bridge)
//!   and reproducible Gaussian draws,
//! * [`sampler`] — endpoint sampling of `dX = L X dt + B dW` through four
//!   interchangeable evaluation strategies, plus the deterministic
//!   Fourier-forced ODE solvers they are built on,
//! * [`moments`] — exact first/second moments, truncation-error formulas and
//!   bounds, and a Lyapunov-ODE cross-check,
//! * [`baselines`] — Euler-Maruyama and backward Euler-Maruyama references,
//! * [`problems`] — ready-made benchmark problems,
//! * [`mc`] — deterministic parallel Monte Carlo reduction helpers.

pub mod baselines;
mod error;
pub mod klprocess;
pub mod matkit;
pub mod mc;
pub mod moments;
pub mod phifn;
pub mod problems;
pub mod sampler;

pub use error::{Error, Result};
