//! Toeplitz phase operators and the exact commutator identity.
//!
//! For any strictly increasing real diagonal h and the matrix with entries
//! Phi[a][b] = i/(h_a - h_b) off the diagonal, the commutator with
//! H = diag(h) satisfies, entry by entry,
//!
//!   (Phi H - H Phi) v = i v - i (sum_b v_b) 1
//!
//! so the canonical law (Phi H - H Phi) v = i v holds exactly on the
//! codimension-one subspace sum v = 0. Everything in this module -- the
//! occupation-basis operator, the integer-factorization-basis operator, the
//! similarity transforms and the subspace condition -- is an instance of
//! that identity.

use crate::chars::DirichletCharacter;
use crate::error::{Error, Result};
use crate::matrix::DenseComplexMatrix;
use crate::primes::primes_up_to;
use num_complex::Complex64;

/// Integer-basis size guard.
pub const INTEGER_BASIS_GUARD: u128 = 1 << 14;

/// Relative hermiticity tolerance accepted by the eigensolver.
pub const HERMITICITY_TOL: f64 = 1e-10;

fn i_c() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

/// (n_cut+1) x (n_cut+1) hermitian Toeplitz phase operator: entry (m, n) is
/// i/(m - n) off the diagonal, 0 on it.
pub fn toeplitz_phase(n_cut: usize) -> DenseComplexMatrix {
    assert!(n_cut >= 1, "need at least a two-level system");
    let d = n_cut + 1;
    let mut m = DenseComplexMatrix::zeros(d);
    for a in 0..d {
        for b in 0..d {
            if a != b {
                m[(a, b)] = i_c() / (a as f64 - b as f64);
            }
        }
    }
    m
}

/// Result of applying the commutator to a vector.
#[derive(Debug, Clone)]
pub struct CommutatorCheck {
    /// w = (Phi H - H Phi) v.
    pub image: Vec<Complex64>,
    /// || w - (i v - i (sum v) 1) ||, the defect of the exact identity.
    pub defect: f64,
    /// sum_b v_b; the pure i*v law holds exactly when this vanishes.
    pub coefficient_sum: Complex64,
}

/// Apply (Phi H - H Phi) to v for diagonal H = diag(h) and report the defect
/// of the identity w = i v - i (sum v) 1. The diagonal must be strictly
/// increasing; `phi` is expected to be built from `h` via i/(h_a - h_b).
pub fn commutator_identity_check(
    phi: &DenseComplexMatrix,
    h: &[f64],
    v: &[Complex64],
) -> Result<CommutatorCheck> {
    let d = h.len();
    if phi.dim() != d || v.len() != d {
        return Err(Error::InvalidConfig(
            "matrix, diagonal and vector dimensions must agree".into(),
        ));
    }
    for (idx, w) in h.windows(2).enumerate() {
        let ascending = w[0] < w[1];
        if !ascending {
            return Err(Error::DegenerateDiagonal(idx + 1));
        }
    }
    // H diagonal, so (Phi H - H Phi)[a][b] = Phi[a][b] (h_b - h_a): using the
    // entry form keeps the difference h_b - h_a cancelling exactly against
    // the one inside Phi.
    let mut image = vec![Complex64::new(0.0, 0.0); d];
    for a in 0..d {
        let mut acc = Complex64::new(0.0, 0.0);
        for b in 0..d {
            if a != b {
                acc += phi[(a, b)] * (h[b] - h[a]) * v[b];
            }
        }
        image[a] = acc;
    }
    let coefficient_sum: Complex64 = v.iter().sum();
    let defect = image
        .iter()
        .zip(v.iter())
        .map(|(w, vv)| (w - (i_c() * vv - i_c() * coefficient_sum)).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(CommutatorCheck {
        image,
        defect,
        coefficient_sum,
    })
}

/// Eigenvalues (ascending) and an orthonormal eigenvector matrix of a
/// hermitian matrix, by cyclic Jacobi rotations. Each returned pair
/// satisfies ||M v - lambda v|| <= 1e-10 ||M||_F.
pub fn hermitian_eigs(m: &DenseComplexMatrix) -> Result<(Vec<f64>, DenseComplexMatrix)> {
    let d = m.dim();
    let scale = m.frobenius_norm();
    if m.hermitian_defect() > HERMITICITY_TOL * scale.max(1e-300) {
        return Err(Error::NotHermitian {
            defect: m.hermitian_defect(),
            tolerance: HERMITICITY_TOL * scale,
        });
    }
    let mut a = m.clone();
    let mut vecs = DenseComplexMatrix::identity(d);
    if scale == 0.0 {
        return Ok((vec![0.0; d], vecs));
    }

    let off_norm = |a: &DenseComplexMatrix| -> f64 {
        let mut s = 0.0;
        for p in 0..d {
            for q in 0..d {
                if p != q {
                    s += a[(p, q)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let target = 1e-14 * scale;
    let max_sweeps = 100;
    let mut converged = false;
    for _ in 0..max_sweeps {
        if off_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag; // e^{i alpha}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
                let t = -sign / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Column update X <- X G with G[p][p]=c, G[p][q]=-s u,
                // G[q][p]=s conj(u), G[q][q]=c.
                for r in 0..d {
                    let xp = a[(r, p)];
                    let xq = a[(r, q)];
                    a[(r, p)] = c * xp + s * phase.conj() * xq;
                    a[(r, q)] = -s * phase * xp + c * xq;
                }
                // Row update X <- G^dagger X.
                for r in 0..d {
                    let xp = a[(p, r)];
                    let xq = a[(q, r)];
                    a[(p, r)] = c * xp + s * phase * xq;
                    a[(q, r)] = -s * phase.conj() * xp + c * xq;
                }
                // Pivot is now zero up to rounding; pin it.
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);

                for r in 0..d {
                    let xp = vecs[(r, p)];
                    let xq = vecs[(r, q)];
                    vecs[(r, p)] = c * xp + s * phase.conj() * xq;
                    vecs[(r, q)] = -s * phase * xp + c * xq;
                }
            }
        }
    }
    if !converged && off_norm(&a) > target {
        return Err(Error::Domain(
            "jacobi eigensolver failed to converge".into(),
        ));
    }

    let mut order: Vec<usize> = (0..d).collect();
    let eigs_raw: Vec<f64> = (0..d).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&x, &y| eigs_raw[x].total_cmp(&eigs_raw[y]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eigs_raw[i]).collect();
    let mut sorted_vecs = DenseComplexMatrix::zeros(d);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..d {
            sorted_vecs[(r, new_col)] = vecs[(r, old_col)];
        }
    }
    Ok((eigenvalues, sorted_vecs))
}

/// Spectrum summary for the Szego-type checks.
#[derive(Debug, Clone, Copy)]
pub struct SzegoSummary {
    pub max_abs: f64,
    /// max_k |lambda_k + lambda_{d-1-k}|: deviation from exact +- pairing.
    pub symmetry_defect: f64,
    /// Fractions of eigenvalues inside [-a, a] for a = pi/4, pi/2, 3pi/4.
    pub band_fractions: [f64; 3],
}

/// Band thresholds reported by [`szego_summary`].
pub const SZEGO_BANDS: [f64; 3] = [
    std::f64::consts::FRAC_PI_4,
    std::f64::consts::FRAC_PI_2,
    3.0 * std::f64::consts::FRAC_PI_4,
];

pub fn szego_summary(eigs: &[f64]) -> SzegoSummary {
    let d = eigs.len();
    let max_abs = eigs.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let symmetry_defect = (0..d)
        .map(|k| (eigs[k] + eigs[d - 1 - k]).abs())
        .fold(0.0f64, f64::max);
    let band_fractions = SZEGO_BANDS.map(|a| {
        eigs.iter().filter(|&&x| x.abs() <= a).count() as f64 / d as f64
    });
    SzegoSummary {
        max_abs,
        symmetry_defect,
        band_fractions,
    }
}

/// Similarity transform Phi_beta = E^{-1} Phi E with E = diag(e^{beta h_n}).
/// Rejects exponents beyond the double range.
pub fn similarity_phase(
    phi: &DenseComplexMatrix,
    h: &[f64],
    beta: Complex64,
) -> Result<DenseComplexMatrix> {
    let d = h.len();
    if phi.dim() != d {
        return Err(Error::InvalidConfig(
            "matrix and diagonal dimensions must agree".into(),
        ));
    }
    let max_h = h.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if beta.re.abs() * max_h > 700.0 {
        return Err(Error::Overflow(format!(
            "similarity exponent {} would overflow",
            beta.re.abs() * max_h
        )));
    }
    let mut out = DenseComplexMatrix::zeros(d);
    for a in 0..d {
        for b in 0..d {
            out[(a, b)] = phi[(a, b)] * (beta * (h[b] - h[a])).exp();
        }
    }
    Ok(out)
}

/// The integers n = prod p^{n_p} with p <= prime_cutoff and n_p <= exponent
/// cutoff, ascending, with their factorizations and logarithms.
#[derive(Debug, Clone)]
pub struct IntegerBasis {
    prime_cutoff: u64,
    exponent_cutoff: usize,
    primes: Vec<u64>,
    members: Vec<u128>,
    /// Exponent tuple per member, aligned with `primes`.
    exponents: Vec<Vec<usize>>,
    log_values: Vec<f64>,
}

impl IntegerBasis {
    pub fn prime_cutoff(&self) -> u64 {
        self.prime_cutoff
    }

    pub fn exponent_cutoff(&self) -> usize {
        self.exponent_cutoff
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn members(&self) -> &[u128] {
        &self.members
    }

    pub fn exponents(&self) -> &[Vec<usize>] {
        &self.exponents
    }

    /// ln n per member, strictly increasing.
    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Build the factorization basis for primes up to p_cut and exponents up to
/// n_cut, sorted by the integer value.
pub fn integer_basis(p_cut: u64, n_cut: usize) -> Result<IntegerBasis> {
    let primes = primes_up_to(p_cut);
    if primes.is_empty() {
        return Err(Error::InvalidConfig(
            "prime cutoff admits no primes".into(),
        ));
    }
    let radix = n_cut as u128 + 1;
    let size = radix.checked_pow(primes.len() as u32).ok_or_else(|| {
        Error::SizeGuard {
            context: "integer basis".into(),
            requested: u128::MAX,
            limit: INTEGER_BASIS_GUARD,
        }
    })?;
    if size > INTEGER_BASIS_GUARD {
        return Err(Error::SizeGuard {
            context: "integer basis".into(),
            requested: size,
            limit: INTEGER_BASIS_GUARD,
        });
    }

    let logs: Vec<f64> = primes.iter().map(|&p| (p as f64).ln()).collect();
    let mut entries: Vec<(u128, Vec<usize>, f64)> = Vec::with_capacity(size as usize);
    for linear in 0..size {
        let mut rem = linear;
        let mut exps = vec![0usize; primes.len()];
        let mut value: u128 = 1;
        let mut log_value = 0.0;
        for j in (0..primes.len()).rev() {
            let e = (rem % radix) as usize;
            rem /= radix;
            exps[j] = e;
            for _ in 0..e {
                value = value.checked_mul(primes[j] as u128).ok_or_else(|| {
                    Error::Overflow("integer basis member exceeds u128".into())
                })?;
            }
            log_value += logs[j] * e as f64;
        }
        entries.push((value, exps, log_value));
    }
    entries.sort_by_key(|e| e.0);
    for w in entries.windows(2) {
        if w[0].2 >= w[1].2 {
            return Err(Error::Overflow(
                "log values not strictly increasing at double precision".into(),
            ));
        }
    }
    Ok(IntegerBasis {
        prime_cutoff: p_cut,
        exponent_cutoff: n_cut,
        primes,
        members: entries.iter().map(|e| e.0).collect(),
        exponents: entries.iter().map(|e| e.1.clone()).collect(),
        log_values: entries.iter().map(|e| e.2).collect(),
    })
}

/// Total phase operator on the factorization basis: entry (a, b) is
/// i/(ln n_a - ln n_b) off the diagonal.
pub fn total_phase(basis: &IntegerBasis) -> DenseComplexMatrix {
    let d = basis.len();
    let h = basis.log_values();
    let mut m = DenseComplexMatrix::zeros(d);
    for a in 0..d {
        for b in 0..d {
            if a != b {
                m[(a, b)] = i_c() / (h[a] - h[b]);
            }
        }
    }
    m
}

/// Coefficients factorized over sites: v_n = prod_p v^{(p)}_{n_p}.
#[derive(Debug, Clone)]
pub struct FactorizedVector {
    /// One coefficient list of length exponent_cutoff + 1 per prime.
    per_prime: Vec<Vec<Complex64>>,
}

impl FactorizedVector {
    pub fn new(per_prime: Vec<Vec<Complex64>>) -> Self {
        Self { per_prime }
    }

    /// Coefficients of characters twisted by p^beta:
    /// v^{(p)}_n = (chi(p) p^beta)^n.
    pub fn from_character(
        basis: &IntegerBasis,
        chi: &DirichletCharacter,
        beta: Complex64,
    ) -> Self {
        let per_prime = basis
            .primes()
            .iter()
            .map(|&p| {
                let z = chi.eval(p as i64) * crate::lfunc::complex_power(p, beta);
                let mut acc = Complex64::new(1.0, 0.0);
                (0..=basis.exponent_cutoff())
                    .map(|n| {
                        if n == 0 {
                            acc
                        } else {
                            acc *= z;
                            acc
                        }
                    })
                    .collect()
            })
            .collect();
        Self { per_prime }
    }

    /// Global coefficient vector over the basis: v_n = prod_p v^{(p)}_{n_p}.
    pub fn global(&self, basis: &IntegerBasis) -> Vec<Complex64> {
        basis
            .exponents()
            .iter()
            .map(|exps| {
                exps.iter()
                    .zip(self.per_prime.iter())
                    .map(|(&e, coeffs)| coeffs[e])
                    .product()
            })
            .collect()
    }

    /// Per-prime coefficient sums; the total sum over the basis is their
    /// product.
    pub fn factor_sums(&self) -> Vec<Complex64> {
        self.per_prime.iter().map(|c| c.iter().sum()).collect()
    }
}

/// prod_{p <= p_cut} sum_{n=0}^{n_cut} (chi(p) p^beta)^n, evaluated as
/// direct geometric sums so the degenerate point chi(p) p^beta = 1 yields
/// n_cut + 1 rather than a 0/0. Away from such points this equals the
/// partition-function ratio; a factorized coefficient vector satisfies the
/// transformed commutator law exactly when this value vanishes.
pub fn subspace_condition_value(
    beta: Complex64,
    p_cut: u64,
    n_cut: usize,
    chi: &DirichletCharacter,
) -> Complex64 {
    primes_up_to(p_cut)
        .into_iter()
        .map(|p| match chi.eval_exact(p as i64) {
            None => Complex64::new(1.0, 0.0),
            Some(root) => (0..=n_cut)
                .map(|n| root.pow(n as u64).value() * crate::lfunc::complex_power(p, beta * n as f64))
                .sum(),
        })
        .product()
}
