//! Crate-wide error type.

use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numeric kernels.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid modulus: {0}")]
    InvalidModulus(u64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("pole encountered: {context} (|denominator| = {magnitude:.3e})")]
    Pole { context: String, magnitude: f64 },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error(
        "root refinement did not converge after {iterations} iterations \
         (last iterate {last}, residual {residual:.3e})"
    )]
    NonConvergence {
        iterations: usize,
        last: Complex64,
        residual: f64,
    },

    #[error("size guard exceeded: {context} would need {requested} states (limit {limit})")]
    SizeGuard {
        context: String,
        requested: u128,
        limit: u128,
    },

    #[error("diagonal entries must be strictly increasing (violated at index {0})")]
    DegenerateDiagonal(usize),

    #[error("matrix is not hermitian: defect {defect:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("numeric overflow: {0}")]
    Overflow(String),

    #[error("insufficient p-adic precision: {0}")]
    InsufficientPrecision(String),
}

pub type Result<T> = std::result::Result<T, Error>;
