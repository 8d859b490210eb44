//! End-to-end checks of the command-line surface.

use std::path::Path;
use std::process::Command;

fn axireg() -> Command {
    Command::new(env!("CARGO_BIN_EXE_axireg"))
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("run.cfg");
    std::fs::write(
        &path,
        "\
[grid]
r_max = 4.0
z_half = 4.0
n_r = 32
n_z = 32

[solver]
nu = 0.1            # viscosity
dt = 5e-4
t_end = 2e-3
projection_tol = 1e-8

[criterion]
eps = 0.05
delta0 = 0.05

[serrin]
s = 6
w = 4
d = 0
delta1 = 0.5

[monitor]
cadence = 2
calibration_states = 8
seed = 7

[initial]
recipe = gaussian_swirl
amplitude = 1.0
width = 1.0
",
    )
    .unwrap();
    path
}

#[test]
fn validate_params_emits_window_json() {
    let out = axireg()
        .args(["validate-params", "--eps", "0.05", "--delta0", "0.05"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], true);
    let windows = v["windows"].as_array().unwrap();
    assert!(windows.iter().any(|w| w["name"] == "alpha_weight_window"));
    assert!(windows.iter().all(|w| w["margin"].is_number()));

    // Out-of-range epsilon fails with the violation listed.
    let out = axireg()
        .args(["validate-params", "--eps", "0.1"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn simulate_report_and_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out_dir = dir.path().join("runs");
    let out = axireg()
        .args([
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--name",
            "demo",
            "--out-dir",
            out_dir.to_str().unwrap(),
            "--set",
            "solver.t_end=1e-3",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run_dir = out_dir.join("demo");
    assert!(run_dir.join("series.csv").exists());
    assert!(run_dir.join("meta.json").exists());
    assert!(run_dir.join("checkpoint_final.axrg").exists());

    let rep = axireg()
        .args(["report", "--run", run_dir.to_str().unwrap()])
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&rep.stdout);
    assert!(rep.status.success(), "{text}");
    assert!(text.contains("verdict: criterion hypotheses numerically consistent"));

    let rep_json = axireg()
        .args(["report", "--run", run_dir.to_str().unwrap(), "--json"])
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&rep_json.stdout).unwrap();
    assert_eq!(v["conclusive"], true);
}

#[test]
fn verify_emits_reports_and_passes() {
    let out = axireg()
        .args([
            "verify", "--grid-n", "48", "--extent", "6", "--states", "4", "--seed", "3",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let reports = v.as_array().unwrap();
    assert!(reports.len() >= 10);
    for r in reports {
        assert_eq!(r["pass"], true, "{r}");
    }
}

#[test]
fn oracle_quadrature_prints_table() {
    let out = axireg()
        .args(["oracle-quadrature", "--grid-n", "48", "--refine", "2", "--seed", "1"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("phi_p"));
    assert!(text.contains("f_serrin"));
    assert!(text.contains("rel diff"));
}
