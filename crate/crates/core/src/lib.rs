//! Nuclear-norm completion of Hankel matrices whose upper anti-triangle is
//! observed, together with an explicit dual certificate for impulse
//! responses of a single stable real pole.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line front end and the parallel sweep runner live in the `hankel-nuclear`
//! companion crate.
//!
//! Module map:
//!
//! - [`matrix`] and [`eigen`]: dense square matrices and a cyclic Jacobi
//!   eigensolver for the symmetric case.
//! - [`hankel`]: anti-diagonal parametrization, deviation basis, nuclear and
//!   spectral norms, singular value thresholding.
//! - [`certificate`]: projectors `P`/`Q`, the matrix `Δ`, the split
//!   `Q₁`/`Q₂`, `M₀`, `M₁` and residual checks for every identity they satisfy.
//! - [`solver`]: ADMM completion plus a brute-force grid oracle for `n ≤ 3`.
//! - [`experiments`]: single- and two-pole sweep cells and grid assembly.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod certificate;
pub mod eigen;
mod error;
pub mod experiments;
pub mod hankel;
pub mod matrix;
mod num;
pub mod solver;

pub use error::{Error, Result};
pub use matrix::Matrix;
