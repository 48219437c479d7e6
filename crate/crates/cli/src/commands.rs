//! Subcommand implementations. Each resolves its parameters against the
//! optional config file, validates them, runs the corresponding kernel and
//! writes deterministic CSV/JSON records (floats at 17 significant digits).

use crate::config::{parse_sites, ConfigMap, GridSpec, UsageError};
use num_complex::Complex64;
use std::io::Write;
use zetaspin_core::chars::{totient, CharacterTable, DirichletCharacter};
use zetaspin_core::lfunc;
use zetaspin_core::padic::{self, WaveletIndex};
use zetaspin_core::phaseop::{self, PhaseBasis};
use zetaspin_core::spinchain::ChainConfig;
use zetaspin_core::toeplitz;

/// Failures split by exit code: usage errors exit 2, computational errors
/// (poles, non-convergence, precision) exit 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Compute(_) => "compute",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Compute(m) => m,
        }
    }
}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        CliError::Usage(e.0)
    }
}

fn core_err(e: zetaspin_core::Error) -> CliError {
    use zetaspin_core::Error;
    match e {
        Error::InvalidModulus(_) | Error::InvalidConfig(_) | Error::SizeGuard { .. } => {
            CliError::Usage(e.to_string())
        }
        _ => CliError::Compute(e.to_string()),
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Compute(format!("output write failed: {e}"))
}

/// 17-significant-digit float rendering, stable for diffing.
fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing required flag {flag}")))
}

/// Character selected by --modulus/--char-index; the trivial character when
/// neither is given.
fn resolve_character(
    modulus: Option<u64>,
    char_index: Option<usize>,
) -> Result<DirichletCharacter, CliError> {
    let k = modulus.unwrap_or(1);
    let index = char_index.unwrap_or(0);
    let table = CharacterTable::build(k).map_err(core_err)?;
    table
        .get(index)
        .cloned()
        .ok_or_else(|| {
            CliError::Usage(format!(
                "--char-index {index} out of range: modulus {k} has {} characters",
                table.len()
            ))
        })
}

// ---------------------------------------------------------------------
// chars

pub struct CharsArgs {
    pub modulus: Option<u64>,
    pub json: bool,
}

pub fn run_chars(args: CharsArgs, cfg: &ConfigMap, out: &mut dyn Write) -> Result<(), CliError> {
    let modulus = require(args.modulus.or(cfg.u64("modulus")?), "--modulus")?;
    let table = CharacterTable::build(modulus).map_err(core_err)?;
    let phi = totient(modulus).map_err(core_err)?;
    if args.json {
        let characters: Vec<serde_json::Value> = table
            .characters()
            .iter()
            .map(|chi| {
                chi.angle_table()
                    .into_iter()
                    .map(|entry| match entry {
                        None => serde_json::Value::Null,
                        Some((num, den)) => serde_json::json!([num, den]),
                    })
                    .collect()
            })
            .collect();
        let doc = serde_json::json!({
            "modulus": modulus,
            "phi": phi,
            "characters": characters,
        });
        writeln!(out, "{doc}").map_err(io_err)?;
    } else {
        writeln!(out, "modulus {modulus}, phi {phi}").map_err(io_err)?;
        for chi in table.characters() {
            let cells: Vec<String> = chi
                .angle_table()
                .into_iter()
                .map(|entry| match entry {
                    None => "0".to_string(),
                    Some((0, _)) => "1".to_string(),
                    Some((num, den)) => format!("e(2pi {num}/{den})"),
                })
                .collect();
            writeln!(out, "chi[{}]: {}", chi.label(), cells.join(" ")).map_err(io_err)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------
// euler

pub struct EulerArgs {
    pub re: Option<f64>,
    pub im: Option<f64>,
    pub prime_cutoff: Option<u64>,
    pub modulus: Option<u64>,
    pub char_index: Option<usize>,
}

pub fn run_euler(args: EulerArgs, cfg: &ConfigMap, out: &mut dyn Write) -> Result<(), CliError> {
    let re = require(args.re.or(cfg.f64("re")?), "--re")?;
    let im = args.im.or(cfg.f64("im")?).unwrap_or(0.0);
    let cutoff = require(
        args.prime_cutoff.or(cfg.u64("prime-cutoff")?),
        "--prime-cutoff",
    )?;
    let chi = resolve_character(
        args.modulus.or(cfg.u64("modulus")?),
        args.char_index.or(cfg.usize("char-index")?),
    )?;
    let s = Complex64::new(re, im);
    let result = lfunc::truncated_euler(s, cutoff, &chi).map_err(core_err)?;
    writeln!(
        out,
        "s-re,s-im,prime-cutoff,modulus,char-index,value-re,value-im,residual,convergent-region"
    )
    .map_err(io_err)?;
    writeln!(
        out,
        "{},{},{},{},{},{},{},,{}",
        fmt_f(re),
        fmt_f(im),
        cutoff,
        chi.modulus(),
        chi.label(),
        fmt_f(result.value.re),
        fmt_f(result.value.im),
        result.in_convergence_region
    )
    .map_err(io_err)?;
    Ok(())
}

// ---------------------------------------------------------------------
// partition-ratio

pub struct PartitionRatioArgs {
    pub beta_re: Option<f64>,
    pub beta_im: Option<f64>,
    pub n_cut: Option<usize>,
    pub prime_cutoff: Option<u64>,
    pub modulus: Option<u64>,
    pub char_index: Option<usize>,
}

pub fn run_partition_ratio(
    args: PartitionRatioArgs,
    cfg: &ConfigMap,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let beta_re = require(args.beta_re.or(cfg.f64("beta-re")?), "--beta-re")?;
    let beta_im = args.beta_im.or(cfg.f64("beta-im")?).unwrap_or(0.0);
    let n_cut = require(args.n_cut.or(cfg.usize("n-cut")?), "--n-cut")?;
    let cutoff = require(
        args.prime_cutoff.or(cfg.u64("prime-cutoff")?),
        "--prime-cutoff",
    )?;
    let chi = resolve_character(
        args.modulus.or(cfg.u64("modulus")?),
        args.char_index.or(cfg.usize("char-index")?),
    )?;
    let spec = lfunc::TruncationSpec::new(cutoff, 1, n_cut).map_err(core_err)?;
    let beta = Complex64::new(beta_re, beta_im);
    let value = lfunc::partition_ratio(beta, &spec, &chi).map_err(core_err)?;
    writeln!(
        out,
        "beta-re,beta-im,n-cut,prime-cutoff,modulus,char-index,value-re,value-im,residual"
    )
    .map_err(io_err)?;
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},",
        fmt_f(beta_re),
        fmt_f(beta_im),
        n_cut,
        cutoff,
        chi.modulus(),
        chi.label(),
        fmt_f(value.re),
        fmt_f(value.im)
    )
    .map_err(io_err)?;
    Ok(())
}

// ---------------------------------------------------------------------
// fisher-zeros

pub struct FisherZerosArgs {
    pub site_prime: Option<u64>,
    pub field_b: Option<f64>,
    pub n_cut: Option<usize>,
}

pub fn run_fisher_zeros(
    args: FisherZerosArgs,
    cfg: &ConfigMap,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let n_cut = require(args.n_cut.or(cfg.usize("n-cut")?), "--n-cut")?;
    let site_prime = args.site_prime.or(cfg.u64("site-prime")?);
    let field_b = match args.field_b.or(cfg.f64("field-b")?) {
        Some(b) if b > 0.0 => b,
        Some(_) => return Err(CliError::Usage("--field-b must be positive".into())),
        None => {
            let p = require(site_prime, "--site-prime (or --field-b)")?;
            if !zetaspin_core::primes::is_prime(p) {
                return Err(CliError::Usage(format!("--site-prime {p} is not prime")));
            }
            (p as f64).ln()
        }
    };
    writeln!(out, "k,beta-re,beta-im,residual").map_err(io_err)?;
    for (k, beta) in lfunc::predicted_fisher_zeros(n_cut, field_b).iter().enumerate() {
        let trace: Complex64 = (0..=n_cut).map(|m| (beta * field_b * m as f64).exp()).sum();
        writeln!(
            out,
            "{},{},{},{}",
            k + 1,
            fmt_f(beta.re),
            fmt_f(beta.im),
            fmt_f(trace.norm())
        )
        .map_err(io_err)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------
// zeta-zero

pub struct ZetaZeroArgs {
    pub re: Option<f64>,
    pub im: Option<f64>,
    pub tol: Option<f64>,
    pub series_length: Option<usize>,
}

pub fn run_zeta_zero(
    args: ZetaZeroArgs,
    cfg: &ConfigMap,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let re = require(args.re.or(cfg.f64("re")?), "--re")?;
    let im = require(args.im.or(cfg.f64("im")?), "--im")?;
    let tol = args.tol.or(cfg.f64("tol")?).unwrap_or(1e-7);
    if tol <= 0.0 {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let n = args.series_length.or(cfg.usize("series-length")?).unwrap_or(2000);
    let seed = Complex64::new(re, im);
    let refined =
        lfunc::refine_zero(|s| lfunc::zeta_reference(s, n), seed, tol).map_err(core_err)?;
    writeln!(
        out,
        "seed-re,seed-im,tol,series-length,value-re,value-im,residual,iterations"
    )
    .map_err(io_err)?;
    writeln!(
        out,
        "{},{},{},{},{},{},{},{}",
        fmt_f(re),
        fmt_f(im),
        fmt_f(tol),
        n,
        fmt_f(refined.root.re),
        fmt_f(refined.root.im),
        fmt_f(refined.residual),
        refined.iterations
    )
    .map_err(io_err)?;
    Ok(())
}

// ---------------------------------------------------------------------
// trace

pub struct TraceArgs {
    pub sites: Option<String>,
    pub n_cut: Option<usize>,
    pub beta_re: Option<f64>,
    pub beta_im: Option<f64>,
    pub modulus: Option<u64>,
    pub char_index: Option<usize>,
}

fn resolve_chain(
    sites: Option<String>,
    n_cut: Option<usize>,
    cfg: &ConfigMap,
) -> Result<ChainConfig, CliError> {
    let sites_text = require(sites.or(cfg.string("sites")?), "--sites")?;
    let sites = parse_sites(&sites_text).map_err(|e| CliError::Usage(format!("--sites: {e}")))?;
    let n_cut = require(n_cut.or(cfg.usize("n-cut")?), "--n-cut")?;
    ChainConfig::new(sites, n_cut).map_err(core_err)
}

pub fn run_trace(args: TraceArgs, cfg: &ConfigMap, out: &mut dyn Write) -> Result<(), CliError> {
    let mut chain = resolve_chain(args.sites, args.n_cut, cfg)?;
    let beta_re = require(args.beta_re.or(cfg.f64("beta-re")?), "--beta-re")?;
    let beta_im = args.beta_im.or(cfg.f64("beta-im")?).unwrap_or(0.0);
    let modulus = args.modulus.or(cfg.u64("modulus")?);
    if modulus.is_some() {
        let chi = resolve_character(modulus, args.char_index.or(cfg.usize("char-index")?))?;
        chain = chain.with_twist(chi);
    }
    let beta = Complex64::new(beta_re, beta_im);
    let trace = chain.partition_trace(beta);

    let sites_text = chain
        .sites()
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(";");
    writeln!(
        out,
        "sites,n-cut,beta-re,beta-im,modulus,char-index,product-re,product-im,brute-re,brute-im,discrepancy"
    )
    .map_err(io_err)?;
    let (brute_re, brute_im, disc) = match (trace.brute_force, trace.discrepancy) {
        (Some(b), Some(d)) => (fmt_f(b.re), fmt_f(b.im), fmt_f(d)),
        _ => (String::new(), String::new(), String::new()),
    };
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{},{}",
        sites_text,
        chain.n_cut(),
        fmt_f(beta_re),
        fmt_f(beta_im),
        chain.twist().map_or(1, |chi| chi.modulus()),
        chain.twist().map_or(0, |chi| chi.label()),
        fmt_f(trace.value.re),
        fmt_f(trace.value.im),
        brute_re,
        brute_im,
        disc
    )
    .map_err(io_err)?;
    Ok(())
}

// ---------------------------------------------------------------------
// covariance-scan

pub struct CovarianceScanArgs {
    pub n_cut: Option<usize>,
    pub site_prime: Option<u64>,
    pub field_b: Option<f64>,
    pub beta_im: Option<GridSpec>,
    pub beta_re: Option<f64>,
    pub modulus: Option<u64>,
    pub char_index: Option<usize>,
    pub plot_data: bool,
}

pub fn run_covariance_scan(
    args: CovarianceScanArgs,
    cfg: &ConfigMap,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let n_cut = require(args.n_cut.or(cfg.usize("n-cut")?), "--n-cut")?;
    let site_prime = args.site_prime.or(cfg.u64("site-prime")?);
    let field_b = match args.field_b.or(cfg.f64("field-b")?) {
        Some(b) => b,
        None => {
            let p = require(site_prime, "--site-prime (or --field-b)")?;
            if !zetaspin_core::primes::is_prime(p) {
                return Err(CliError::Usage(format!("--site-prime {p} is not prime")));
            }
            (p as f64).ln()
        }
    };
    let modulus = args.modulus.or(cfg.u64("modulus")?);
    let omega = match modulus {
        None => 0.0,
        Some(_) => {
            let chi = resolve_character(modulus, args.char_index.or(cfg.usize("char-index")?))?;
            let p = require(site_prime, "--site-prime (required with --modulus)")?;
            let value = chi.eval(p as i64);
            if value.norm() == 0.0 {
                return Err(CliError::Usage(format!(
                    "character vanishes at site prime {p}: no twisted phase"
                )));
            }
            value.arg()
        }
    };
    let grid = require(args.beta_im.or(cfg.grid("beta-im")?), "--beta-im")?;
    let beta_re = args.beta_re.or(cfg.f64("beta-re")?).unwrap_or(0.0);

    let basis = PhaseBasis::new(n_cut, field_b)
        .map_err(core_err)?
        .with_omega(omega);
    if args.plot_data {
        for t in grid.points() {
            let report = basis.covariance_residual(Complex64::new(beta_re, t));
            writeln!(out, "{} {}", fmt_f(t), fmt_f(report.residual)).map_err(io_err)?;
        }
        return Ok(());
    }
    // value = single-site twisted trace at beta, so the scan shows the
    // partition-function zeroes landing on the covariant points.
    writeln!(
        out,
        "beta-re,beta-im,value-re,value-im,residual,raw-residual,special"
    )
    .map_err(io_err)?;
    for t in grid.points() {
        let beta = Complex64::new(beta_re, t);
        let report = basis.covariance_residual(beta);
        let value = basis.trace_exp(beta);
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_f(beta_re),
            fmt_f(t),
            fmt_f(value.re),
            fmt_f(value.im),
            fmt_f(report.residual),
            fmt_f(report.raw_residual),
            report.special
        )
        .map_err(io_err)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------
// resolvent-scan

pub struct ResolventScanArgs {
    pub sites: Option<String>,
    pub n_cut: Option<usize>,
    pub phi: Option<GridSpec>,
    pub plot_data: bool,
}

pub fn run_resolvent_scan(
    args: ResolventScanArgs,
    cfg: &ConfigMap,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let chain = resolve_chain(args.sites, args.n_cut, cfg)?;
    let grid = require(args.phi.or(cfg.grid("phi")?), "--phi")?;
    if args.plot_data {
        for phi in grid.points() {
            if let Ok(value) = phaseop::aggregate_resolvent_trace(&chain, phi) {
                writeln!(out, "{} {}", fmt_f(phi), fmt_f(value.norm())).map_err(io_err)?;
            }
        }
        return Ok(());
    }
    writeln!(out, "phi,value-re,value-im,note").map_err(io_err)?;
    for phi in grid.points() {
        match phaseop::aggregate_resolvent_trace(&chain, phi) {
            Ok(value) => writeln!(
                out,
                "{},{},{},",
                fmt_f(phi),
                fmt_f(value.re),
                fmt_f(value.im)
            )
            .map_err(io_err)?,
            Err(zetaspin_core::Error::Pole { .. }) => {
                writeln!(out, "{},,,pole", fmt_f(phi)).map_err(io_err)?
            }
            Err(e) => return Err(core_err(e)),
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------
// toeplitz-spectrum

pub struct ToeplitzSpectrumArgs {
    pub n_cut: Option<usize>,
    pub total: bool,
    pub prime_cutoff: Option<u64>,
}

pub fn run_toeplitz_spectrum(
    args: ToeplitzSpectrumArgs,
    cfg: &ConfigMap,
    out: &mut dyn Write,
    summary_out: &mut dyn Write,
) -> Result<(), CliError> {
    let n_cut = require(args.n_cut.or(cfg.usize("n-cut")?), "--n-cut")?;
    if n_cut == 0 {
        return Err(CliError::Usage("--n-cut must be >= 1".into()));
    }
    let matrix = if args.total {
        let cutoff = require(
            args.prime_cutoff.or(cfg.u64("prime-cutoff")?),
            "--prime-cutoff (required with --total)",
        )?;
        let basis = toeplitz::integer_basis(cutoff, n_cut).map_err(core_err)?;
        toeplitz::total_phase(&basis)
    } else {
        toeplitz::toeplitz_phase(n_cut)
    };
    let (eigs, _) = toeplitz::hermitian_eigs(&matrix).map_err(core_err)?;
    writeln!(out, "index,eigenvalue").map_err(io_err)?;
    for (i, lambda) in eigs.iter().enumerate() {
        writeln!(out, "{},{}", i, fmt_f(*lambda)).map_err(io_err)?;
    }
    let summary = toeplitz::szego_summary(&eigs);
    let doc = serde_json::json!({
        "dimension": eigs.len(),
        "max_abs": summary.max_abs,
        "symmetry_defect": summary.symmetry_defect,
        "band_fractions": {
            "pi_over_4": summary.band_fractions[0],
            "pi_over_2": summary.band_fractions[1],
            "three_pi_over_4": summary.band_fractions[2],
        },
    });
    writeln!(summary_out, "{doc}").map_err(io_err)?;
    Ok(())
}

// ---------------------------------------------------------------------
// padic-check

pub struct PadicCheckArgs {
    pub prime: Option<u64>,
    pub alpha_re: Option<f64>,
    pub alpha_im: Option<f64>,
    pub scale: Option<i64>,
}

pub fn run_padic_check(
    args: PadicCheckArgs,
    cfg: &ConfigMap,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let prime = require(args.prime.or(cfg.u64("prime")?), "--prime")?;
    let alpha_re = require(args.alpha_re.or(cfg.f64("alpha-re")?), "--alpha-re")?;
    let alpha_im = args.alpha_im.or(cfg.f64("alpha-im")?).unwrap_or(0.0);
    let scale = require(
        args.scale.or(cfg.u64("scale")?.map(|v| v as i64)),
        "--scale",
    )?;
    let alpha = Complex64::new(alpha_re, alpha_im);
    let idx = WaveletIndex::new(prime, scale).map_err(core_err)?;
    let eigenvalue = idx.vladimirov_eigenvalue(alpha);

    // Representatives of the p sub-balls plus two deeper probes and the
    // center: enough points to see every locally-constant cell.
    let mut points = Vec::new();
    let center = idx.center();
    for t in 0..prime.min(5) {
        points.push((
            format!("c+{t}*p^{}", -scale),
            center.add(&padic::PadicNumber::from_integer(prime, t as i64).mul_p_power(-scale)),
        ));
    }
    for s in 1..=2i64 {
        points.push((
            format!("c+{s}*p^{}", 1 - scale),
            center.add(&padic::PadicNumber::from_integer(prime, s).mul_p_power(1 - scale)),
        ));
    }

    writeln!(
        out,
        "point,psi-re,psi-im,dpsi-re,dpsi-im,eigen-ratio-re,eigen-ratio-im,defect"
    )
    .map_err(io_err)?;
    for (label, xi) in &points {
        let psi = padic::kozyrev_eval(&idx, xi).map_err(core_err)?;
        let dpsi = padic::vladimirov_apply(alpha, &idx, xi).map_err(core_err)?;
        let ratio = if psi.norm() > 0.0 {
            dpsi / psi
        } else {
            Complex64::new(0.0, 0.0)
        };
        let defect = (dpsi - eigenvalue * psi).norm();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            label,
            fmt_f(psi.re),
            fmt_f(psi.im),
            fmt_f(dpsi.re),
            fmt_f(dpsi.im),
            fmt_f(ratio.re),
            fmt_f(ratio.im),
            fmt_f(defect)
        )
        .map_err(io_err)?;
    }
    Ok(())
}
