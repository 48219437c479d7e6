//! Spectral numerics for truncated Euler products and their operator
//! realizations: Dirichlet character tables, local factors and series
//! oracles, finite spin chains whose traces are partition-function ratios,
//! phase operators with shift covariance at the Fisher zeroes, Toeplitz
//! phase operators with their codimension-one commutator identity, and
//! p-adic Kozyrev wavelets as exact eigenfunctions of the Vladimirov
//! derivative.

pub mod chars;
pub mod error;
pub mod lfunc;
pub mod matrix;
pub mod padic;
pub mod phaseop;
pub mod primes;
pub mod spinchain;
pub mod toeplitz;

pub use error::{Error, Result};
pub use matrix::DenseComplexMatrix;
pub use num_complex::Complex64;
