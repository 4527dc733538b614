//! End-to-end runs of the `coulomb-pt` binary.

use std::path::Path;
use std::process::{Command, Output};

use coulomb_pt::special::digamma;
use coulomb_pt::Kinematics;
use coulomb_pt_cli::output::sha256_hex;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coulomb-pt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Numeric data rows of a CSV payload, footer lines skipped.
fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn phase_shift_table() {
    let csv = stdout(&["phase-shifts", "--l-max", "50", "--l-max-delta2", "5"]);
    assert_eq!(csv.lines().next().unwrap(), "l,delta1_bar,delta2,sigma_exact,delta2_quad_error");
    let rows = rows(&csv);
    assert_eq!(rows.len(), 51);
    let eta = Kinematics::electron(0.02).unwrap().eta().unwrap();
    assert!((rows[1][1] - eta * digamma(2.0).unwrap()).abs() < 1e-10 * eta);
    assert!(rows[0][1] < 0.0);
    // held past l = 5, diagnostics only where computed
    assert!(rows[6..].iter().all(|r| r[2] == rows[5][2] && r[4].is_nan()));
    assert!(rows[..=5].iter().all(|r| r[2] > 0.0 && r[4].is_finite()));
}

#[test]
fn free_theory_is_zero() {
    let csv = stdout(&["phase-shifts", "--alpha", "0", "--l-max", "4"]);
    assert!(rows(&csv).iter().all(|r| r[1..4].iter().all(|&v| v == 0.0)));
}

#[test]
fn first_order_run_has_no_second_order_column_values() {
    let csv = stdout(&["phase-shifts", "--order", "1", "--l-max", "3"]);
    assert!(rows(&csv).iter().all(|r| r[2] == 0.0 && r[4].is_nan()));
}

#[test]
fn angular_sweep_follows_rutherford_at_low_momentum() {
    let csv = stdout(&["xsec-angle", "--theta-min-deg", "30", "--theta-max-deg", "150", "--theta-step-deg", "10"]);
    let rows = rows(&csv);
    assert_eq!(rows.len(), 13);
    for r in &rows {
        assert!((r[1] / r[2] - 1.0).abs() <= 0.05, "theta = {}: {r:?}", r[0]);
    }
}

#[test]
fn symmetrised_sweep_is_palindromic() {
    let csv = stdout(&["xsec-angle", "--p-mev", "5", "--symmetrize", "--theta-step-deg", "5"]);
    let model: Vec<f64> = rows(&csv).iter().map(|r| r[1]).collect();
    assert_eq!(model.len(), 35);
    let reversed: Vec<f64> = model.iter().rev().copied().collect();
    assert_eq!(model, reversed);
}

#[test]
fn momentum_sweep_grid_and_low_momentum_limit() {
    let csv = stdout(&["xsec-momentum", "--p-min-mev", "0.03", "--p-max-mev", "3", "--p-points", "5"]);
    let rows = rows(&csv);
    assert_eq!(rows.len(), 5);
    assert!((rows[0][0] - 0.03).abs() < 1e-12 && (rows[4][0] - 3.0).abs() < 1e-10);
    assert!((rows[2][0] - 0.3).abs() < 1e-10, "log spacing: {}", rows[2][0]);
    assert!((rows[0][1] / rows[0][2] - 1.0).abs() < 0.05);
    assert!(rows.windows(2).all(|w| w[1][2] < w[0][2]));
}

#[test]
fn delta_profile_peaks_at_zero() {
    let csv = stdout(&["delta-profile", "--delta-min", "-1", "--delta-max", "1", "--delta-step", "0.25"]);
    assert_eq!(rows(&csv).len(), 9);
    let footer = csv.lines().last().unwrap();
    let argmax: f64 = footer.strip_prefix("# argmax_delta,").unwrap().parse().unwrap();
    assert_eq!(argmax, 0.0);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["validate"]).status.code(), Some(0));
    assert_eq!(run(&["validate", "--force-tolerance", "1e-20"]).status.code(), Some(1));
    assert_eq!(run(&["phase-shifts", "--p-mev=-1"]).status.code(), Some(2));
    assert_eq!(run(&["phase-shifts", "--order", "3"]).status.code(), Some(2));
    assert_eq!(run(&["xsec-angle", "--theta-min-deg", "0"]).status.code(), Some(2));
    assert_eq!(run(&["xsec-angle", "--epsilon", "0.5", "--l-max", "2"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn validation_report_lists_every_check() {
    let out = run(&["validate"]);
    let stderr = String::from_utf8(out.stderr).unwrap();
    let report = String::from_utf8(out.stdout).unwrap();
    assert_eq!(report.lines().next().unwrap(), "check,computed,reference,abs_error,tolerance,pass");
    let checks = report.lines().count() - 1;
    assert!(checks >= 20);
    assert_eq!(stderr.lines().filter(|l| l.starts_with("[PASS]")).count(), checks);
}

#[test]
fn csv_file_gets_complete_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("xs.csv");
    stdout(&["xsec-angle", "--theta-step-deg", "10", "--out", out.to_str().unwrap()]);
    let payload = std::fs::read(&out).unwrap();
    let manifest = read_json(&dir.path().join("xs.csv.manifest.json"));
    assert_eq!(manifest["command"], "xsec-angle");
    assert_eq!(manifest["output_checksum_sha256"], sha256_hex(&payload));
    assert!(manifest["timestamp"].as_str().unwrap().contains('T'));
    let settings = &manifest["config"]["settings"];
    // every default is resolved to a concrete value
    for (key, value) in settings.as_object().unwrap() {
        assert!(!value.is_null(), "{key} unresolved");
    }
    assert_eq!(settings["l_max"], 7000);
    assert_eq!(settings["extension"], "hold");
    assert!(manifest["config"]["pv_quad"].is_object());
    assert!(manifest["config"]["kinematics"]["eta"].as_f64().unwrap() > 0.0);
}

#[test]
fn json_output_embeds_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("profile.json");
    stdout(&["delta-profile", "--delta-step", "0.5", "--format", "json", "--out", out.to_str().unwrap()]);
    let doc = read_json(&out);
    assert_eq!(doc["manifest"]["format"], "json");
    assert_eq!(doc["manifest"]["output_checksum_sha256"], sha256_hex(doc["data"].to_string().as_bytes()));
    assert_eq!(doc["data"]["rows"].as_array().unwrap().len(), 21);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["phase-shifts", "--l-max", "20", "--l-max-delta2", "10"];
    assert_eq!(stdout(&args), stdout(&args));
    let args = ["xsec-angle", "--p-mev", "1", "--theta-step-deg", "7"];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn flags_override_config_file_over_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "p_mev = 0.5\nl_max = 6\nl_max_delta2 = 2\n").unwrap();
    let out = dir.path().join("ps.csv");
    let cfg = cfg.to_str().unwrap();
    stdout(&["phase-shifts", "--config", cfg, "--l-max", "4", "--out", out.to_str().unwrap()]);
    let manifest = read_json(&dir.path().join("ps.csv.manifest.json"));
    let settings = &manifest["config"]["settings"];
    assert_eq!(settings["p_mev"], 0.5);
    assert_eq!(settings["l_max"], 4);
    assert_eq!(settings["l_max_delta2"], 2);
    assert_eq!(settings["epsilon"], 1e-3);
    assert_eq!(rows(&std::fs::read_to_string(&out).unwrap()).len(), 5);

    std::fs::write(dir.path().join("bad.toml"), "no_such_key = 1\n").unwrap();
    let bad = dir.path().join("bad.toml");
    assert_eq!(run(&["phase-shifts", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}
