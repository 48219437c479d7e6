//! Local Euler factors, truncated Euler products, Dirichlet-series reference
//! oracles, the finite partition-function ratio, Fisher-zero prediction and
//! secant root refinement.
//!
//! Complex powers p^{-s} are always computed as exp(-s ln p) with the real
//! positive branch of ln p. Products over primes run in fixed-size chunks
//! with an ordered reduction, so results are bit-stable under any thread
//! count.

use crate::chars::DirichletCharacter;
use crate::error::{Error, Result};
use crate::primes::primes_up_to;
use num_complex::Complex64;
use rayon::prelude::*;

/// Relative pole-guard threshold: double-precision noise floor with headroom.
pub const POLE_GUARD: f64 = 1e-14;

const PRIME_CHUNK: usize = 1024;

/// Truncation parameters shared by the product- and series-side evaluations.
#[derive(Debug, Clone, Copy)]
pub struct TruncationSpec {
    /// Largest prime admitted into products.
    pub prime_cutoff: u64,
    /// Number of terms in reference Dirichlet series.
    pub series_length: usize,
    /// Per-site occupation bound (geometric sums run over 0..=exponent_cutoff).
    pub exponent_cutoff: usize,
}

impl TruncationSpec {
    /// The cutoff is an inclusive upper bound: every product runs over the
    /// primes <= prime_cutoff, so any bound >= 2 is accepted.
    pub fn new(prime_cutoff: u64, series_length: usize, exponent_cutoff: usize) -> Result<Self> {
        if prime_cutoff < 2 {
            return Err(Error::InvalidConfig(format!(
                "prime cutoff {prime_cutoff} admits no primes"
            )));
        }
        if series_length == 0 {
            return Err(Error::InvalidConfig("series length must be >= 1".into()));
        }
        if exponent_cutoff == 0 {
            return Err(Error::InvalidConfig("exponent cutoff must be >= 1".into()));
        }
        Ok(Self {
            prime_cutoff,
            series_length,
            exponent_cutoff,
        })
    }
}

/// n^z = exp(z ln n), real positive branch of the logarithm.
pub fn complex_power(n: u64, z: Complex64) -> Complex64 {
    (z * (n as f64).ln()).exp()
}

/// Local factor 1/(1 - chi(p) p^{-s}). Errors on the pole.
pub fn local_factor(p: u64, s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    let z = chi.eval(p as i64) * complex_power(p, -s);
    let den = Complex64::new(1.0, 0.0) - z;
    if den.norm() < POLE_GUARD * (1.0 + z.norm()) {
        return Err(Error::Pole {
            context: format!("local factor at p = {p}"),
            magnitude: den.norm(),
        });
    }
    Ok(den.inv())
}

/// Truncated Euler product and whether s sits in the absolute-convergence
/// half plane Re(s) > 1.
#[derive(Debug, Clone, Copy)]
pub struct EulerProductValue {
    pub value: Complex64,
    pub in_convergence_region: bool,
}

/// prod_{p <= cutoff} 1/(1 - chi(p) p^{-s}); primes with chi(p) = 0
/// contribute the factor 1.
pub fn truncated_euler(
    s: Complex64,
    prime_cutoff: u64,
    chi: &DirichletCharacter,
) -> Result<EulerProductValue> {
    let primes = primes_up_to(prime_cutoff);
    let chunk_products: Vec<Result<Complex64>> = primes
        .par_chunks(PRIME_CHUNK)
        .map(|chunk| {
            let mut acc = Complex64::new(1.0, 0.0);
            for &p in chunk {
                acc *= local_factor(p, s, chi)?;
            }
            Ok(acc)
        })
        .collect();
    let mut value = Complex64::new(1.0, 0.0);
    for c in chunk_products {
        value *= c?;
    }
    Ok(EulerProductValue {
        value,
        in_convergence_region: s.re > 1.0,
    })
}

/// Plain partial sum sum_{n=1}^{N} chi(n) n^{-s}: the brute-force series
/// oracle, meaningful for Re(s) > 1.
pub fn dirichlet_series(s: Complex64, n_terms: usize, chi: &DirichletCharacter) -> Complex64 {
    let k = chi.modulus();
    let table: Vec<Complex64> = (0..k).map(|r| chi.eval(r as i64)).collect();
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..=n_terms as u64 {
        let coeff = table[(n % k) as usize];
        if coeff.norm_sqr() == 0.0 {
            continue;
        }
        sum += coeff * complex_power(n, -s);
    }
    sum
}

/// Number of trailing partial sums folded by the averaging accelerator.
const ETA_AVERAGING_LEVELS: usize = 60;

/// Riemann zeta on the strip Re(s) > 0 via the alternating eta series with
/// repeated averaging of partial sums:
/// zeta(s) = (1 - 2^{1-s})^{-1} sum (-1)^{n-1} n^{-s}. Accuracy improves
/// with `n_terms`.
pub fn zeta_reference(s: Complex64, n_terms: usize) -> Result<Complex64> {
    if s.re <= 0.0 {
        return Err(Error::Domain(format!(
            "eta-series oracle needs Re(s) > 0, got {}",
            s.re
        )));
    }
    let prefactor_den =
        Complex64::new(1.0, 0.0) - ((Complex64::new(1.0, 0.0) - s) * std::f64::consts::LN_2).exp();
    if prefactor_den.norm() < POLE_GUARD {
        return Err(Error::Pole {
            context: format!("zeta oracle at s = {s} (1 - 2^(1-s) vanishes)"),
            magnitude: prefactor_den.norm(),
        });
    }

    let n_terms = n_terms.max(4);
    let levels = ETA_AVERAGING_LEVELS.min(n_terms / 2);
    let direct = n_terms - levels;

    let term = |n: usize| -> Complex64 {
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        sign * complex_power(n as u64, -s)
    };

    let mut partial = Complex64::new(0.0, 0.0);
    for n in 1..=direct {
        partial += term(n);
    }
    // Partial sums S_direct .. S_{direct+levels}, then triangular averaging:
    // the survivor carries binomial weights 2^-levels * C(levels, j).
    let mut buf = Vec::with_capacity(levels + 1);
    buf.push(partial);
    for j in 1..=levels {
        partial += term(direct + j);
        buf.push(partial);
    }
    for width in (1..=levels).rev() {
        for i in 0..width {
            buf[i] = 0.5 * (buf[i] + buf[i + 1]);
        }
    }
    Ok(buf[0] / prefactor_den)
}

/// Finite partition-function ratio
/// prod_{p <= cutoff} (1 - chi^{n+1}(p) p^{beta(n+1)}) / (1 - chi(p) p^{beta}),
/// with factor 1 at primes where chi(p) = 0.
pub fn partition_ratio(
    beta: Complex64,
    spec: &TruncationSpec,
    chi: &DirichletCharacter,
) -> Result<Complex64> {
    let primes = primes_up_to(spec.prime_cutoff);
    let m = (spec.exponent_cutoff + 1) as u64;
    let chunk_products: Vec<Result<Complex64>> = primes
        .par_chunks(PRIME_CHUNK)
        .map(|chunk| {
            let mut acc = Complex64::new(1.0, 0.0);
            for &p in chunk {
                let Some(root) = chi.eval_exact(p as i64) else {
                    continue; // chi(p) = 0: factor 1
                };
                let base = root.value() * complex_power(p, beta);
                let den = Complex64::new(1.0, 0.0) - base;
                if den.norm() < POLE_GUARD * (1.0 + base.norm()) {
                    return Err(Error::Pole {
                        context: format!("partition ratio denominator at p = {p}"),
                        magnitude: den.norm(),
                    });
                }
                let num =
                    Complex64::new(1.0, 0.0) - root.pow(m).value() * complex_power(p, beta * m as f64);
                acc *= num / den;
            }
            Ok(acc)
        })
        .collect();
    let mut value = Complex64::new(1.0, 0.0);
    for c in chunk_products {
        value *= c?;
    }
    Ok(value)
}

/// The n_cut purely imaginary Fisher zeros of a single site with field B:
/// beta = 2 pi i k / (B (n_cut + 1)), k = 1..=n_cut, principal
/// representatives modulo 2 pi i / B.
pub fn predicted_fisher_zeros(n_cut: usize, field_b: f64) -> Vec<Complex64> {
    assert!(field_b > 0.0, "field must be positive");
    (1..=n_cut)
        .map(|k| {
            Complex64::new(
                0.0,
                std::f64::consts::TAU * k as f64 / (field_b * (n_cut as f64 + 1.0)),
            )
        })
        .collect()
}

/// Output of a successful secant refinement.
#[derive(Debug, Clone, Copy)]
pub struct RefinedRoot {
    pub root: Complex64,
    pub residual: f64,
    pub iterations: usize,
}

/// Default iteration cap for [`refine_zero`].
pub const REFINE_MAX_ITERATIONS: usize = 64;

/// Secant iteration for a root of an analytic function near `seed`.
/// The function may itself fail (pole guards); that aborts the refinement.
pub fn refine_zero<F>(f: F, seed: Complex64, tol: f64) -> Result<RefinedRoot>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    assert!(tol > 0.0, "tolerance must be positive");
    let fail = |iterations, last: Complex64, residual| Error::NonConvergence {
        iterations,
        last,
        residual,
    };

    let mut x0 = seed;
    let mut f0 = f(x0)?;
    if f0.norm() < tol {
        return Ok(RefinedRoot {
            root: x0,
            residual: f0.norm(),
            iterations: 0,
        });
    }
    let offset = 1e-4 * (1.0 + seed.norm());
    let mut x1 = seed + Complex64::new(offset, offset);
    let mut f1 = f(x1).map_err(|_| fail(0, x0, f0.norm()))?;

    for iteration in 1..=REFINE_MAX_ITERATIONS {
        if f1.norm() < tol {
            return Ok(RefinedRoot {
                root: x1,
                residual: f1.norm(),
                iterations: iteration - 1,
            });
        }
        let den = f1 - f0;
        if den.norm() < 1e-300 {
            return Err(fail(iteration, x1, f1.norm()));
        }
        let x2 = x1 - f1 * (x1 - x0) / den;
        let f2 = f(x2).map_err(|_| fail(iteration, x1, f1.norm()))?;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
    }
    Err(fail(REFINE_MAX_ITERATIONS, x1, f1.norm()))
}
