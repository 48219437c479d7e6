//! zetaspin: spectral numerics for truncated Euler products, spin-chain
//! partition traces, phase operators and p-adic wavelets.
//!
//! Exit codes: 0 success, 1 computational error (pole, non-convergence,
//! insufficient precision), 2 usage error. Errors are also emitted as a
//! machine-readable JSON line on stderr.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use commands::CliError;
use config::{ConfigMap, GridSpec};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "zetaspin", version, about = "spectral numerics toolkit", max_term_width = 100)]
struct Cli {
    /// Flat JSON config file; command-line flags override its entries.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write primary output to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Dirichlet character table mod k.
    Chars {
        #[arg(long)]
        modulus: Option<u64>,
        /// Emit {modulus, phi, characters} as JSON (angle fractions or null).
        #[arg(long)]
        json: bool,
    },
    /// Truncated Euler product over primes up to the cutoff.
    Euler {
        #[arg(long, allow_hyphen_values = true)]
        re: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        im: Option<f64>,
        #[arg(long)]
        prime_cutoff: Option<u64>,
        #[arg(long)]
        modulus: Option<u64>,
        #[arg(long)]
        char_index: Option<usize>,
    },
    /// Finite partition-function ratio over primes up to the cutoff.
    PartitionRatio {
        #[arg(long, allow_hyphen_values = true)]
        beta_re: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        beta_im: Option<f64>,
        #[arg(long)]
        n_cut: Option<usize>,
        #[arg(long)]
        prime_cutoff: Option<u64>,
        #[arg(long)]
        modulus: Option<u64>,
        #[arg(long)]
        char_index: Option<usize>,
    },
    /// Predicted single-site Fisher zeros on the imaginary beta axis.
    FisherZeros {
        #[arg(long)]
        site_prime: Option<u64>,
        /// Field value B; defaults to ln(site-prime).
        #[arg(long, allow_hyphen_values = true)]
        field_b: Option<f64>,
        #[arg(long)]
        n_cut: Option<usize>,
    },
    /// Secant refinement of a zeta zero from a seed, using the eta-series
    /// strip oracle.
    ZetaZero {
        #[arg(long, allow_hyphen_values = true)]
        re: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        im: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        tol: Option<f64>,
        #[arg(long)]
        series_length: Option<usize>,
    },
    /// Twisted partition trace of a finite chain, via both the factorized
    /// product and the brute-force tensor sum.
    Trace {
        /// Comma-separated ascending prime sites, e.g. 2,3,5.
        #[arg(long)]
        sites: Option<String>,
        #[arg(long)]
        n_cut: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        beta_re: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        beta_im: Option<f64>,
        #[arg(long)]
        modulus: Option<u64>,
        #[arg(long)]
        char_index: Option<usize>,
    },
    /// Shift-covariance residual along an imaginary-beta grid.
    CovarianceScan {
        #[arg(long)]
        n_cut: Option<usize>,
        #[arg(long)]
        site_prime: Option<u64>,
        /// Field value B; defaults to ln(site-prime).
        #[arg(long, allow_hyphen_values = true)]
        field_b: Option<f64>,
        /// Grid start:stop:steps over Im(beta).
        #[arg(long, allow_hyphen_values = true)]
        beta_im: Option<GridSpec>,
        #[arg(long, allow_hyphen_values = true)]
        beta_re: Option<f64>,
        #[arg(long)]
        modulus: Option<u64>,
        #[arg(long)]
        char_index: Option<usize>,
        /// Two-column gnuplot-ready output (beta-im residual).
        #[arg(long)]
        plot_data: bool,
    },
    /// Trace of the aggregate resolvent along a phi grid.
    ResolventScan {
        #[arg(long)]
        sites: Option<String>,
        #[arg(long)]
        n_cut: Option<usize>,
        /// Grid start:stop:steps over phi.
        #[arg(long, allow_hyphen_values = true)]
        phi: Option<GridSpec>,
        /// Two-column gnuplot-ready output (phi |trace|).
        #[arg(long)]
        plot_data: bool,
    },
    /// Eigenvalues of the Toeplitz phase operator (occupation basis, or the
    /// integer-factorization basis with --total), plus a spectrum summary.
    ToeplitzSpectrum {
        #[arg(long)]
        n_cut: Option<usize>,
        /// Use the total phase operator on the factorization basis.
        #[arg(long)]
        total: bool,
        #[arg(long)]
        prime_cutoff: Option<u64>,
    },
    /// Verify the Vladimirov eigen-relation on a wavelet, point by point.
    PadicCheck {
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        alpha_re: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        alpha_im: Option<f64>,
        /// Wavelet scale label n: the eigenvalue is p^(alpha (1 - n)).
        #[arg(long, allow_hyphen_values = true)]
        scale: Option<i64>,
    },
}

fn init_thread_pool() {
    if let Ok(text) = std::env::var("ZETASPIN_THREADS") {
        if let Ok(n) = text.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn open_output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match path {
        None => Ok(Box::new(std::io::BufWriter::new(std::io::stdout()))),
        Some(p) => {
            let file = std::fs::File::create(p)
                .map_err(|e| CliError::Usage(format!("--output {}: {e}", p.display())))?;
            Ok(Box::new(std::io::BufWriter::new(file)))
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let cfg = ConfigMap::load(cli.config.as_deref())?;
    let mut out = open_output(cli.output.as_ref())?;
    match cli.command {
        Command::Chars { modulus, json } => {
            commands::run_chars(commands::CharsArgs { modulus, json }, &cfg, &mut out)?
        }
        Command::Euler {
            re,
            im,
            prime_cutoff,
            modulus,
            char_index,
        } => commands::run_euler(
            commands::EulerArgs {
                re,
                im,
                prime_cutoff,
                modulus,
                char_index,
            },
            &cfg,
            &mut out,
        )?,
        Command::PartitionRatio {
            beta_re,
            beta_im,
            n_cut,
            prime_cutoff,
            modulus,
            char_index,
        } => commands::run_partition_ratio(
            commands::PartitionRatioArgs {
                beta_re,
                beta_im,
                n_cut,
                prime_cutoff,
                modulus,
                char_index,
            },
            &cfg,
            &mut out,
        )?,
        Command::FisherZeros {
            site_prime,
            field_b,
            n_cut,
        } => commands::run_fisher_zeros(
            commands::FisherZerosArgs {
                site_prime,
                field_b,
                n_cut,
            },
            &cfg,
            &mut out,
        )?,
        Command::ZetaZero {
            re,
            im,
            tol,
            series_length,
        } => commands::run_zeta_zero(
            commands::ZetaZeroArgs {
                re,
                im,
                tol,
                series_length,
            },
            &cfg,
            &mut out,
        )?,
        Command::Trace {
            sites,
            n_cut,
            beta_re,
            beta_im,
            modulus,
            char_index,
        } => commands::run_trace(
            commands::TraceArgs {
                sites,
                n_cut,
                beta_re,
                beta_im,
                modulus,
                char_index,
            },
            &cfg,
            &mut out,
        )?,
        Command::CovarianceScan {
            n_cut,
            site_prime,
            field_b,
            beta_im,
            beta_re,
            modulus,
            char_index,
            plot_data,
        } => commands::run_covariance_scan(
            commands::CovarianceScanArgs {
                n_cut,
                site_prime,
                field_b,
                beta_im,
                beta_re,
                modulus,
                char_index,
                plot_data,
            },
            &cfg,
            &mut out,
        )?,
        Command::ResolventScan {
            sites,
            n_cut,
            phi,
            plot_data,
        } => commands::run_resolvent_scan(
            commands::ResolventScanArgs {
                sites,
                n_cut,
                phi,
                plot_data,
            },
            &cfg,
            &mut out,
        )?,
        Command::ToeplitzSpectrum {
            n_cut,
            total,
            prime_cutoff,
        } => {
            // CSV to the primary stream; the summary JSON goes to stdout
            // when the CSV is redirected to a file.
            if cli.output.is_some() {
                let mut summary = std::io::BufWriter::new(std::io::stdout());
                commands::run_toeplitz_spectrum(
                    commands::ToeplitzSpectrumArgs {
                        n_cut,
                        total,
                        prime_cutoff,
                    },
                    &cfg,
                    &mut out,
                    &mut summary,
                )?;
                summary.flush().map_err(|e| CliError::Compute(e.to_string()))?;
            } else {
                let args = commands::ToeplitzSpectrumArgs {
                    n_cut,
                    total,
                    prime_cutoff,
                };
                // Both streams interleave on stdout: CSV first, JSON last.
                let mut buffer = Vec::new();
                commands::run_toeplitz_spectrum(args, &cfg, &mut out, &mut buffer)?;
                out.write_all(&buffer)
                    .map_err(|e| CliError::Compute(e.to_string()))?;
            }
        }
        Command::PadicCheck {
            prime,
            alpha_re,
            alpha_im,
            scale,
        } => commands::run_padic_check(
            commands::PadicCheckArgs {
                prime,
                alpha_re,
                alpha_im,
                scale,
            },
            &cfg,
            &mut out,
        )?,
    }
    out.flush().map_err(|e| CliError::Compute(e.to_string()))?;
    Ok(())
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            let doc = serde_json::json!({
                "error": { "kind": e.kind(), "message": e.message() }
            });
            eprintln!("{doc}");
            match e {
                CliError::Usage(_) => ExitCode::from(2),
                CliError::Compute(_) => ExitCode::from(1),
            }
        }
    }
}
