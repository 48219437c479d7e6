//! Acceptance suite: one test per criterion, each printing a pass line
//! (visible with --nocapture) and enforcing its stated tolerance. Every
//! expected value is either computed by an independent oracle inside this
//! file or is a frozen regression constant produced by those oracles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{LN_2, PI, TAU};
use std::time::{Duration, Instant};
use zetaspin_core::chars::{principal, totient, CharacterTable, DirichletCharacter};
use zetaspin_core::lfunc::{
    dirichlet_series, partition_ratio, predicted_fisher_zeros, refine_zero, truncated_euler,
    zeta_reference, TruncationSpec,
};
use zetaspin_core::phaseop::{aggregate_resolvent_trace, PhaseBasis};
use zetaspin_core::spinchain::ChainConfig;
use zetaspin_core::toeplitz::{
    commutator_identity_check, hermitian_eigs, integer_basis, szego_summary, toeplitz_phase,
    total_phase,
};
use zetaspin_core::{Complex64, DenseComplexMatrix};

fn pass(number: u32, detail: &str) {
    println!("acceptance criterion {number:02}: PASS ({detail})");
}

fn chi_mod4() -> DirichletCharacter {
    CharacterTable::build(4).unwrap().characters()[1].clone()
}

// -----------------------------------------------------------------------
// 1. Character orthogonality for all k <= 60, error < 1e-12, under 1 s.

#[test]
fn criterion_01_character_orthogonality() {
    let start = Instant::now();
    let mut max_err = 0.0f64;
    for k in 1..=60u64 {
        let table = CharacterTable::build(k).unwrap();
        let phi = totient(k).unwrap() as f64;
        for (i, chi_i) in table.characters().iter().enumerate() {
            for (j, chi_j) in table.characters().iter().enumerate() {
                let sum: Complex64 = (0..k)
                    .map(|r| chi_i.eval(r as i64) * chi_j.eval(r as i64).conj())
                    .sum();
                let expected = if i == j { phi } else { 0.0 };
                max_err = max_err.max((sum - Complex64::new(expected, 0.0)).norm());
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(max_err < 1e-12, "orthogonality error {max_err:e}");
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    pass(1, &format!("max error {max_err:.2e}, {elapsed:?}"));
}

// -----------------------------------------------------------------------
// 2. Truncated Euler products against series oracles, relative 1e-4,
//    under 30 s.

#[test]
fn criterion_02_euler_series_agreement() {
    let start = Instant::now();

    // Oracle: sum_{n <= 1e7} n^{-2}, accumulated small-to-large.
    let mut basel = 0.0f64;
    for n in (1..=10_000_000u64).rev() {
        basel += 1.0 / (n as f64 * n as f64);
    }
    let trivial = principal(1).unwrap();
    let product = truncated_euler(Complex64::new(2.0, 0.0), 100_000, &trivial)
        .unwrap()
        .value;
    let rel_trivial = (product - Complex64::new(basel, 0.0)).norm() / basel;
    assert!(rel_trivial < 1e-4, "trivial character: {rel_trivial:e}");

    // Oracle: the alternating series sum (-1)^m / (2m+1)^2.
    let mut catalan = 0.0f64;
    for m in (0..=1_000_000i64).rev() {
        let term = 1.0 / ((2 * m + 1) as f64).powi(2);
        catalan += if m % 2 == 0 { term } else { -term };
    }
    let product4 = truncated_euler(Complex64::new(2.0, 0.0), 100_000, &chi_mod4())
        .unwrap()
        .value;
    let rel_chi4 = (product4 - Complex64::new(catalan, 0.0)).norm() / catalan;
    assert!(rel_chi4 < 1e-4, "character mod 4: {rel_chi4:e}");

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    pass(
        2,
        &format!("relative errors {rel_trivial:.2e} and {rel_chi4:.2e}, {elapsed:?}"),
    );
}

// -----------------------------------------------------------------------
// 3. Partition ratio at beta = -2, n_cut = 1 against series-oracle
//    quotients, relative 1e-4, for the trivial and mod-4 characters.

#[test]
fn criterion_03_partition_ratio_vs_series() {
    let trivial = principal(1).unwrap();
    let spec = TruncationSpec::new(100_000, 1_000_000, 1).unwrap();
    let beta = Complex64::new(-2.0, 0.0);

    let zeta2 = dirichlet_series(Complex64::new(2.0, 0.0), 1_000_000, &trivial);
    let zeta4 = dirichlet_series(Complex64::new(4.0, 0.0), 1_000_000, &trivial);
    let oracle = zeta2 / zeta4;
    // The oracle itself confirms the quoted magnitude ~1.5198.
    assert!((oracle.re - 15.0 / (PI * PI)).abs() < 1e-4, "oracle {oracle}");
    let ratio = partition_ratio(beta, &spec, &trivial).unwrap();
    let rel_trivial = (ratio - oracle).norm() / oracle.norm();
    assert!(rel_trivial < 1e-4, "trivial: {rel_trivial:e}");

    // The denominator L-function carries the squared character (n_cut + 1
    // = 2), which for the mod-4 character is the principal character mod 4.
    let chi = chi_mod4();
    let l2 = dirichlet_series(Complex64::new(2.0, 0.0), 1_000_000, &chi);
    let l4 = dirichlet_series(Complex64::new(4.0, 0.0), 1_000_000, &chi.pow(2));
    let oracle4 = l2 / l4;
    let ratio4 = partition_ratio(beta, &spec, &chi).unwrap();
    let rel_chi4 = (ratio4 - oracle4).norm() / oracle4.norm();
    assert!(rel_chi4 < 1e-4, "mod 4: {rel_chi4:e}");

    pass(
        3,
        &format!("relative errors {rel_trivial:.2e} and {rel_chi4:.2e}"),
    );
}

// -----------------------------------------------------------------------
// 4. Fisher-zero / covariance coincidence: every predicted lattice point
//    kills the single-site trace and the covariance residual (< 1e-10);
//    off-lattice points keep the residual above 1e-2. Under 5 s.

#[test]
fn criterion_04_fisher_zero_covariance_coincidence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut off_lattice_checked = 0usize;
    let mut worst_on = 0.0f64;
    let mut worst_off = f64::INFINITY;
    for field_b in [1.0, LN_2, 3.0f64.ln()] {
        for n_cut in 1..=8usize {
            let basis = PhaseBasis::new(n_cut, field_b).unwrap();
            for beta in predicted_fisher_zeros(n_cut, field_b) {
                let trace = basis.trace_exp(beta).norm();
                let report = basis.covariance_residual(beta);
                assert!(trace < 1e-10, "B={field_b} n={n_cut} trace {trace:e}");
                assert!(
                    report.residual < 1e-10,
                    "B={field_b} n={n_cut} residual {:e}",
                    report.residual
                );
                assert!(report.special);
                worst_on = worst_on.max(trace).max(report.residual);
            }
            // Off-lattice samples, kept clear of the lattice points.
            let spacing = TAU / (field_b * (n_cut as f64 + 1.0));
            for _ in 0..5 {
                let t = loop {
                    let t = rng.gen_range(0.0..TAU / field_b);
                    let steps = t / spacing;
                    if (steps - steps.round()).abs() > 0.05 {
                        break t;
                    }
                };
                let report = basis.covariance_residual(Complex64::new(0.0, t));
                assert!(
                    report.residual > 1e-2,
                    "B={field_b} n={n_cut} t={t} residual {:e}",
                    report.residual
                );
                assert!(!report.special);
                worst_off = worst_off.min(report.residual);
                off_lattice_checked += 1;
            }
        }
    }
    assert!(off_lattice_checked >= 100);
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    pass(
        4,
        &format!(
            "on-lattice worst {worst_on:.2e}, off-lattice floor {worst_off:.2e} over {off_lattice_checked} samples, {elapsed:?}"
        ),
    );
}

// -----------------------------------------------------------------------
// 5. Two-path trace equality on 50 random twisted/untwisted chains with
//    basis <= 4096, relative 1e-12.

#[test]
fn criterion_05_two_path_trace_equality() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let pool = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31];
    let moduli = [3u64, 4, 5, 8, 12];
    let mut worst = 0.0f64;
    for trial in 0..50 {
        let n_sites = rng.gen_range(1..=4usize);
        let mut sites: Vec<u64> = Vec::new();
        while sites.len() < n_sites {
            let p = pool[rng.gen_range(0..pool.len())];
            if !sites.contains(&p) {
                sites.push(p);
            }
        }
        sites.sort();
        let max_n = match n_sites {
            1 => 8,
            2 => 5,
            3 => 3,
            _ => 2,
        };
        let n_cut = rng.gen_range(1..=max_n);
        let mut chain = ChainConfig::new(sites, n_cut).unwrap();
        if trial % 2 == 1 {
            let k = moduli[rng.gen_range(0..moduli.len())];
            let table = CharacterTable::build(k).unwrap();
            let chi = table.characters()[rng.gen_range(0..table.len())].clone();
            chain = chain.with_twist(chi);
        }
        assert!(chain.basis_size() <= 4096);
        let beta = Complex64::new(rng.gen_range(-2.0..0.5), rng.gen_range(-3.0..3.0));
        let trace = chain.partition_trace(beta);
        let brute = trace.brute_force.expect("basis within guard");
        let scale = trace.value.norm().max(brute.norm());
        let rel = trace.discrepancy.unwrap() / scale;
        assert!(
            rel < 1e-12,
            "trial {trial}: relative discrepancy {rel:e} (product {}, brute {brute})",
            trace.value
        );
        worst = worst.max(rel);
    }
    pass(5, &format!("worst relative discrepancy {worst:.2e}"));
}

// -----------------------------------------------------------------------
// 6. Pole/zero alignment for sites {2,3,5}, n_cut = 2 on a 1e4-point grid
//    over one aggregate period. The scan window is the shortest single-site
//    period 2 pi / ln 5; within it the pole and zero sets coincide with no
//    periodic images.

#[test]
fn criterion_06_pole_zero_alignment() {
    let chain = ChainConfig::new(vec![2, 3, 5], 2).unwrap();
    let window = TAU / 5.0f64.ln();
    let n = 10_000usize;
    let step = window / n as f64;

    let mut resolvent_mag = vec![f64::INFINITY; n]; // phi = 0 is a true pole
    let mut trace_mag = vec![0.0f64; n];
    for i in 0..n {
        let phi = i as f64 * step;
        if i > 0 {
            resolvent_mag[i] = aggregate_resolvent_trace(&chain, phi).unwrap().norm();
        }
        trace_mag[i] = chain
            .partition_trace(Complex64::new(0.0, phi))
            .value
            .norm();
    }

    let maxima: Vec<usize> = (1..n - 1)
        .filter(|&i| resolvent_mag[i] >= resolvent_mag[i - 1] && resolvent_mag[i] >= resolvent_mag[i + 1])
        .collect();
    let zeros: Vec<usize> = (1..n - 1)
        .filter(|&i| {
            trace_mag[i] <= trace_mag[i - 1] && trace_mag[i] <= trace_mag[i + 1] && trace_mag[i] < 0.1
        })
        .collect();

    assert!(!zeros.is_empty() && !maxima.is_empty());
    for &z in &zeros {
        assert!(
            maxima.iter().any(|&m| m.abs_diff(z) <= 1),
            "zero at index {z} (phi {}) has no matching resolvent maximum",
            z as f64 * step
        );
    }
    for &m in &maxima {
        assert!(
            zeros.iter().any(|&z| z.abs_diff(m) <= 1),
            "maximum at index {m} (phi {}) has no matching trace zero",
            m as f64 * step
        );
    }
    pass(
        6,
        &format!("{} zeros and {} maxima matched within one grid step", zeros.len(), maxima.len()),
    );
}

// -----------------------------------------------------------------------
// 7. Toeplitz commutator identity on 200 random (h, v) up to dimension 512,
//    plus the {1,2,3,6} hand case, norm below 1e-10 (1 + ||v||).

#[test]
fn criterion_07_commutator_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for trial in 0..200 {
        let d = rng.gen_range(2..=512usize);
        let mut h: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..20.0)).collect();
        h.sort_by(f64::total_cmp);
        h.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let d = h.len();
        let mut phi = DenseComplexMatrix::zeros(d);
        for a in 0..d {
            for b in 0..d {
                if a != b {
                    phi[(a, b)] = Complex64::new(0.0, 1.0) / (h[a] - h[b]);
                }
            }
        }
        let zero_sum = trial % 3 == 0;
        let mut v: Vec<Complex64> = (0..d)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        if zero_sum {
            let mean: Complex64 = v.iter().sum::<Complex64>() / d as f64;
            for x in &mut v {
                *x -= mean;
            }
        }
        let norm_v: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let check = commutator_identity_check(&phi, &h, &v).unwrap();
        assert!(
            check.defect < 1e-10 * (1.0 + norm_v),
            "trial {trial} dim {d}: defect {:e}",
            check.defect
        );
        if zero_sum {
            // With the projected coefficients the pure i*v law holds.
            let pure: f64 = check
                .image
                .iter()
                .zip(v.iter())
                .map(|(w, vv)| (w - Complex64::new(0.0, 1.0) * vv).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(
                pure < 1e-9 * (1.0 + norm_v),
                "trial {trial}: pure-law defect {pure:e}"
            );
        }
        worst = worst.max(check.defect / (1.0 + norm_v));
    }

    // Hand case on the factorization basis {1, 2, 3, 6}.
    let basis = integer_basis(3, 1).unwrap();
    assert_eq!(basis.members(), &[1, 2, 3, 6]);
    let phi = total_phase(&basis);
    let v = [
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(1.0, 0.0),
    ];
    let check = commutator_identity_check(&phi, basis.log_values(), &v).unwrap();
    for (w, vv) in check.image.iter().zip(v.iter()) {
        assert!(
            (w - Complex64::new(0.0, 1.0) * vv).norm() < 1e-14,
            "hand case: {w} vs i*{vv}"
        );
    }
    pass(7, &format!("worst scaled defect {worst:.2e} over 200 trials"));
}

// -----------------------------------------------------------------------
// 8. Szego-type spectrum checks for n_cut in {63, 127, 255}: bound pi,
//    +-pairing below 1e-8, half the spectrum in [-pi/2, pi/2] up to 0.05.
//    Under 60 s with the Jacobi reference solver.

#[test]
fn criterion_08_szego_spectrum() {
    let start = Instant::now();
    for n_cut in [63usize, 127, 255] {
        let (eigs, _) = hermitian_eigs(&toeplitz_phase(n_cut)).unwrap();
        let summary = szego_summary(&eigs);
        assert!(
            summary.max_abs <= PI + 1e-6,
            "n_cut={n_cut}: max |lambda| = {}",
            summary.max_abs
        );
        assert!(
            summary.symmetry_defect < 1e-8,
            "n_cut={n_cut}: symmetry defect {:e}",
            summary.symmetry_defect
        );
        assert!(
            (summary.band_fractions[1] - 0.5).abs() < 0.05,
            "n_cut={n_cut}: fraction in [-pi/2, pi/2] is {}",
            summary.band_fractions[1]
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    pass(8, &format!("dimensions 64/128/256 in {elapsed:?}"));
}

// -----------------------------------------------------------------------
// 9. Vladimirov eigen-relation: exact shell sums match p^{alpha(1-n)} psi
//    to 1e-10 for p in {2,3,5}, labels n in {-1,0,1,2}, three alphas and
//    at least five points per case.

#[test]
fn criterion_09_vladimirov_eigen_relation() {
    use zetaspin_core::padic::{kozyrev_eval, vladimirov_apply, PadicNumber, WaveletIndex};
    let alphas = [
        Complex64::new(1.0, 0.0),
        Complex64::new(2.0, 0.0),
        Complex64::new(0.5, 0.5),
    ];
    let mut cases = 0usize;
    let mut worst = 0.0f64;
    for p in [2u64, 3, 5] {
        for label in [-1i64, 0, 1, 2] {
            let idx = WaveletIndex::new(p, label).unwrap();
            let mut points = Vec::new();
            points.push(idx.center());
            for t in 1..p.min(3) {
                points.push(
                    idx.center()
                        .add(&PadicNumber::from_integer(p, t as i64).mul_p_power(-label)),
                );
            }
            for s in 1..=3i64 {
                points.push(
                    idx.center()
                        .add(&PadicNumber::from_integer(p, s).mul_p_power(1 - label)),
                );
            }
            assert!(points.len() >= 5);
            for alpha in alphas {
                let eigenvalue = idx.vladimirov_eigenvalue(alpha);
                for xi in &points {
                    let psi = kozyrev_eval(&idx, xi).unwrap();
                    let applied = vladimirov_apply(alpha, &idx, xi).unwrap();
                    let defect = (applied - eigenvalue * psi).norm() / (1.0 + psi.norm());
                    assert!(
                        defect < 1e-10,
                        "p={p} n={label} alpha={alpha}: defect {defect:e}"
                    );
                    worst = worst.max(defect);
                    cases += 1;
                }
            }
        }
    }
    pass(9, &format!("worst scaled defect {worst:.2e} over {cases} evaluations"));
}

// -----------------------------------------------------------------------
// 10. Twisted covariance: for p in {3, 5} and the non-principal characters
//     mod 4 and mod 5, the residual vanishes (< 1e-10) exactly on the
//     shifted lattice i beta = 2 pi k/((n+1) ln p) + omega_p/ln p.
//     Combinations with chi(p) = 0 have no twisted phase and are skipped.

#[test]
fn criterion_10_twisted_covariance() {
    let table4 = CharacterTable::build(4).unwrap();
    let table5 = CharacterTable::build(5).unwrap();
    let mut characters: Vec<DirichletCharacter> = Vec::new();
    characters.extend(table4.characters().iter().skip(1).cloned());
    characters.extend(table5.characters().iter().skip(1).cloned());

    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for p in [3u64, 5] {
        for chi in &characters {
            let value = chi.eval(p as i64);
            if value.norm() == 0.0 {
                continue; // p divides the modulus: no twist angle
            }
            let omega = value.arg();
            let field_b = (p as f64).ln();
            for n_cut in 1..=8usize {
                let basis = PhaseBasis::new(n_cut, field_b).unwrap().with_omega(omega);
                for k in 0..=n_cut {
                    // i beta on the shifted lattice.
                    let ibeta = TAU * k as f64 / ((n_cut as f64 + 1.0) * field_b)
                        + omega / field_b;
                    let beta = Complex64::new(0.0, -ibeta);
                    let report = basis.covariance_residual(beta);
                    assert!(
                        report.residual < 1e-10,
                        "p={p} mod {} label {} n={n_cut} k={k}: residual {:e}",
                        chi.modulus(),
                        chi.label(),
                        report.residual
                    );
                    assert!(report.special, "p={p} k={k}: lattice flag");
                    worst = worst.max(report.residual);
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 0);
    pass(10, &format!("worst residual {worst:.2e} over {checked} lattice points"));
}

// -----------------------------------------------------------------------
// 11. Strip-oracle zero: secant refinement from 0.5 + 14i lands on a root
//     with |zeta| < 1e-5 and Im in (14.0, 14.3); the located value is
//     frozen below as a regression constant (produced by this oracle, see
//     the residual assertion).

/// Frozen output of refine_zero over the eta-series oracle (series length
/// 2000, tolerance 1e-10), recorded from this suite's own run.
const FIRST_STRIP_ZERO: Complex64 = Complex64::new(0.5, 14.134725141734693);

#[test]
fn criterion_11_strip_oracle_zero() {
    let refined = refine_zero(
        |s| zeta_reference(s, 2000),
        Complex64::new(0.5, 14.0),
        1e-10,
    )
    .unwrap();
    assert!(refined.residual < 1e-5, "residual {:e}", refined.residual);
    assert!(
        refined.root.im > 14.0 && refined.root.im < 14.3,
        "root {}",
        refined.root
    );
    let drift = (refined.root - FIRST_STRIP_ZERO).norm();
    assert!(drift < 1e-8, "regression drift {drift:e} from frozen constant");
    pass(
        11,
        &format!(
            "root {:.12}+{:.12}i, residual {:.2e}, drift {drift:.2e}",
            refined.root.re, refined.root.im, refined.residual
        ),
    );
}

// -----------------------------------------------------------------------
// Interface-level checks used by later stages: the product-trace identity
// bridging the subspace condition to the partition ratio, exercised through
// the same public surfaces the CLI exposes.

#[test]
fn subspace_condition_bridges_to_partition_ratio() {
    use zetaspin_core::toeplitz::subspace_condition_value;
    let chi = chi_mod4();
    let trivial = principal(1).unwrap();
    for (chi, beta, n_cut) in [
        (&trivial, Complex64::new(-1.1, 0.4), 2usize),
        (&chi, Complex64::new(-0.9, -0.6), 3),
    ] {
        let spec = TruncationSpec::new(29, 1, n_cut).unwrap();
        let lhs = subspace_condition_value(beta, 29, n_cut, chi);
        let rhs = partition_ratio(beta, &spec, chi).unwrap();
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
    }
}
