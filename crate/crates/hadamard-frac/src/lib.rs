//! Numerics for Hadamard-type fractional operators and the test-function
//! machinery behind nonexistence criteria for a time-fractional Schrödinger
//! equation with a singular logarithmic potential.
//!
//! The crate is organized as:
//!
//! - [`special`]: Gamma and Beta functions (positive axis).
//! - [`quad`]: singular-kernel quadrature (Gauss–Jacobi, graded, tanh-sinh).
//! - [`kernels`]: Riemann–Liouville and Hadamard fractional integrals and
//!   the Hadamard–Caputo derivative.
//! - [`testfn`]: the μ family, smooth radial cutoffs, and their closed-form
//!   fractional images.
//! - [`criterion`]: exponent-region arithmetic and nonexistence verdicts.
//! - [`initial`]: radial initial-data profiles and their N-dimensional
//!   integrals.
//! - [`probe`]: numerical verification of the proof-chain estimates and the
//!   weak-formulation residuals.

pub mod criterion;
pub mod error;
pub mod initial;
pub mod kernels;
pub mod probe;
pub mod quad;
pub mod special;
pub mod testfn;

pub use error::{Error, Result};
