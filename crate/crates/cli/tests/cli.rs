//! End-to-end checks of the command-line surface: flag parsing, config
//! merging, exit codes, stderr error JSON, output determinism and the
//! row-count contracts.

use num_complex::Complex64;
use std::process::{Command, Output};

fn zetaspin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zetaspin"))
        .args(args)
        .env("ZETASPIN_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn trace_valid_invocation() {
    let out = zetaspin(&[
        "trace", "--sites", "2,3", "--n-cut", "1", "--beta-re", "-2", "--beta-im", "0",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "sites,n-cut,beta-re,beta-im,modulus,char-index,product-re,product-im,brute-re,brute-im,discrepancy"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("2;3,1,"));
    // 25/18 at beta = -2.
    assert!(row.contains("1.3888888888888888e0"), "row: {row}");
}

#[test]
fn trace_rejects_non_prime_sites() {
    let out = zetaspin(&["trace", "--sites", "4,6", "--n-cut", "1", "--beta-re", "-2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    let json_line = err.lines().last().unwrap();
    let doc: serde_json::Value = serde_json::from_str(json_line).expect("stderr JSON");
    assert_eq!(doc["error"]["kind"], "usage");
    assert!(doc["error"]["message"].as_str().unwrap().contains("4"));
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = zetaspin(&["trace", "--sites", "2", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("--frobnicate"));
}

#[test]
fn missing_required_flag_names_it() {
    let out = zetaspin(&["euler", "--prime-cutoff", "100"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("--re"));
}

#[test]
fn computational_error_exits_one() {
    // beta = 0 is a pole of every denominator factor.
    let out = zetaspin(&[
        "partition-ratio", "--beta-re", "0", "--n-cut", "1", "--prime-cutoff", "10",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_of(&out);
    let doc: serde_json::Value =
        serde_json::from_str(err.lines().last().unwrap()).expect("stderr JSON");
    assert_eq!(doc["error"]["kind"], "compute");
}

#[test]
fn config_file_provides_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.json");
    std::fs::write(
        &path,
        r#"{"n-cut": 2, "field-b": 1.0, "beta-im": "0:6.28:5"}"#,
    )
    .unwrap();

    let out = zetaspin(&["covariance-scan", "--config", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out).lines().count(), 6); // header + 5 rows

    let out = zetaspin(&[
        "covariance-scan",
        "--config",
        path.to_str().unwrap(),
        "--beta-im",
        "0:6.28:3",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out).lines().count(), 4); // command line wins
}

#[test]
fn resolvent_scan_row_count_contract() {
    let out = zetaspin(&[
        "resolvent-scan", "--sites", "2,3", "--n-cut", "1", "--phi", "0:6.3:10000",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert_eq!(text.lines().count(), 10_001); // header + 1e4 rows
    assert!(text.lines().nth(1).unwrap().ends_with(",pole")); // phi = 0
}

#[test]
fn plot_data_is_two_column() {
    let out = zetaspin(&[
        "resolvent-scan", "--sites", "2,3", "--n-cut", "1", "--phi", "1:2:10", "--plot-data",
    ]);
    assert!(out.status.success());
    for line in stdout_of(&out).lines() {
        assert_eq!(line.split(' ').count(), 2, "line: {line}");
    }
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = zetaspin(&[
            "covariance-scan",
            "--n-cut",
            "3",
            "--site-prime",
            "3",
            "--beta-im",
            "0:9:400",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn fisher_zeros_values() {
    let out = zetaspin(&["fisher-zeros", "--site-prime", "2", "--n-cut", "2"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    let want = std::f64::consts::TAU / (3.0 * std::f64::consts::LN_2);
    for (k, row) in rows.iter().enumerate() {
        let cells: Vec<&str> = row.split(',').collect();
        let im: f64 = cells[2].parse().unwrap();
        assert!((im - want * (k as f64 + 1.0)).abs() < 1e-12);
        let residual: f64 = cells[3].parse().unwrap();
        assert!(residual < 1e-12);
    }
}

#[test]
fn partition_ratio_matches_zeta_quotient() {
    let out = zetaspin(&[
        "partition-ratio", "--beta-re", "-2", "--n-cut", "1", "--prime-cutoff", "100000",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let row = text.lines().nth(1).unwrap();
    let value: f64 = row.split(',').nth(6).unwrap().parse().unwrap();
    assert!((value - 1.519817).abs() < 1e-4, "value {value}");
}

#[test]
fn chars_json_shape() {
    let out = zetaspin(&["chars", "--modulus", "4", "--json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    assert_eq!(doc["modulus"], 4);
    assert_eq!(doc["phi"], 2);
    let characters = doc["characters"].as_array().unwrap();
    assert_eq!(characters.len(), 2);
    // Non-principal character: chi(3) = e^{2 pi i * 1/2} = -1.
    assert_eq!(characters[1][3], serde_json::json!([1, 2]));
    assert_eq!(characters[1][2], serde_json::Value::Null);
}

#[test]
fn zeta_zero_lands_near_the_first_zero() {
    let out = zetaspin(&["zeta-zero", "--re", "0.5", "--im", "14", "--tol", "1e-8"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let cells: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let im: f64 = cells[5].parse().unwrap();
    assert!(im > 14.0 && im < 14.3, "im {im}");
    let residual: f64 = cells[6].parse().unwrap();
    assert!(residual < 1e-5);
}

#[test]
fn toeplitz_spectrum_emits_csv_and_summary() {
    let out = zetaspin(&["toeplitz-spectrum", "--n-cut", "7"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,eigenvalue");
    assert_eq!(lines.len(), 1 + 8 + 1); // header, eigenvalues, summary JSON
    let doc: serde_json::Value = serde_json::from_str(lines.last().unwrap()).unwrap();
    assert_eq!(doc["dimension"], 8);
    assert!(doc["max_abs"].as_f64().unwrap() <= std::f64::consts::PI);
}

#[test]
fn toeplitz_total_uses_factorization_basis() {
    let out = zetaspin(&[
        "toeplitz-spectrum", "--n-cut", "1", "--total", "--prime-cutoff", "3",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert_eq!(text.lines().count(), 1 + 4 + 1); // basis {1,2,3,6}
}

#[test]
fn padic_check_zero_defects() {
    let out = zetaspin(&[
        "padic-check", "--prime", "3", "--alpha-re", "0.5", "--alpha-im", "0.5", "--scale", "1",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    for row in text.lines().skip(1) {
        let defect: f64 = row.split(',').next_back().unwrap().parse().unwrap();
        assert!(defect < 1e-10, "row: {row}");
    }
}

#[test]
fn covariance_scan_twisted_lattice() {
    // chi mod 4 at p = 3 has omega = pi; with n-cut 1 the k = 1 point of
    // the shifted lattice sits at i beta = pi/ln3 + pi/ln3 = 2 pi/ln3.
    let ln3 = 3.0f64.ln();
    let lattice = 2.0 * std::f64::consts::PI / ln3;
    let arg = format!("{}:{}:1", -lattice, lattice);
    let out = zetaspin(&[
        "covariance-scan",
        "--n-cut",
        "1",
        "--site-prime",
        "3",
        "--modulus",
        "4",
        "--char-index",
        "1",
        "--beta-im",
        &arg,
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let cells: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let residual: f64 = cells[4].parse().unwrap();
    assert!(residual < 1e-10, "residual {residual}");
    assert_eq!(cells[6], "true");
    // The twisted trace itself vanishes on the shifted lattice point.
    let value = Complex64::new(cells[2].parse().unwrap(), cells[3].parse().unwrap());
    assert!(value.norm() < 1e-12, "trace {value}");
}

#[test]
fn covariance_scan_rejects_vanishing_character() {
    let out = zetaspin(&[
        "covariance-scan", "--n-cut", "1", "--site-prime", "2", "--modulus", "4",
        "--char-index", "1", "--beta-im", "0:1:2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("vanishes"));
}
