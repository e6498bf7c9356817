//! End-to-end runs of the `omring` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn omring(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omring"))
        .args(args)
        .env_remove("OMRING_THREADS")
        .output()
        .expect("binary runs")
}

fn run_config(task: &str, config: &Path, extra: &[&str]) -> Output {
    let mut args = vec![task, "--config", config.to_str().unwrap()];
    args.extend_from_slice(extra);
    omring(&args)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("omring-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn body(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn diode_spectrum_reads_one_zero_at_resonance() {
    let out = run_config("spectrum", &configs().join("diode.toml"), &[]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = body(&text);
    assert_eq!(rows[0], "delta,abs_tR2,abs_tL2,tR_re,tR_im,tL_re,tL_im");
    let center: Vec<f64> = rows
        .iter()
        .find(|r| r.starts_with("0,"))
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((center[1] - 1.0).abs() < 1e-10 && center[2].abs() < 1e-10);
}

#[test]
fn header_declares_conventions_and_threshold() {
    let out = run_config("bandwidth", &configs().join("isolator.toml"), &[]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# conventions = ")));
    assert!(text
        .lines()
        .any(|l| l.starts_with("# bandwidth_threshold = 0.5")));
    assert!(!text.contains('\r'));
}

#[test]
fn microtoroid_point_classifies() {
    let out = run_config("classify", &configs().join("microtoroid.toml"), &[]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"strong coupling, sideband resolved\""));
}

#[test]
fn negative_rate_exits_2_without_output() {
    let bad = scratch("negative.toml");
    let text = std::fs::read_to_string(configs().join("isolator.toml"))
        .unwrap()
        .replace("kappa = 1", "kappa = -1");
    std::fs::write(&bad, text).unwrap();
    let target = scratch("negative.csv");
    let _ = std::fs::remove_file(&target);
    let out = run_config("spectrum", &bad, &["--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!target.exists());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(v["code"], 2);
    assert_eq!(v["kind"], "config");
}

#[test]
fn unstable_model_exits_3() {
    let cfg = scratch("unstable.toml");
    let text = std::fs::read_to_string(configs().join("isolator.toml"))
        .unwrap()
        .replace("g_r = 5", "g_r = 12");
    std::fs::write(&cfg, text).unwrap();
    let out = run_config("spectrum", &cfg, &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
}

#[test]
fn suffix_outside_hz_mode_is_config_error() {
    let cfg = scratch("suffix.toml");
    let text = std::fs::read_to_string(configs().join("isolator.toml"))
        .unwrap()
        .replace("omega_m = 20", "omega_m = \"20 MHz\"");
    std::fs::write(&cfg, text).unwrap();
    assert_eq!(run_config("spectrum", &cfg, &[]).status.code(), Some(2));
}

#[test]
fn declared_task_must_match() {
    let out = run_config("noise", &configs().join("diode.toml"), &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_mirrors_csv() {
    let cfg = configs().join("phase_shifter.toml");
    let csv = String::from_utf8(run_config("phase", &cfg, &[]).stdout).unwrap();
    let json = run_config("phase", &cfg, &["--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    let rows = body(&csv);
    assert_eq!(
        v["columns"].as_array().unwrap().len(),
        rows[0].split(',').count()
    );
    assert_eq!(v["rows"].as_array().unwrap().len(), rows.len() - 1);
    assert_eq!(v["metadata"]["task"], "phase");
}

#[test]
fn thread_count_does_not_change_output() {
    let cfg = configs().join("contour.toml");
    let one = run_config("contour", &cfg, &["--threads", "1"]);
    let four = Command::new(env!("CARGO_BIN_EXE_omring"))
        .args(["contour", "--config", cfg.to_str().unwrap()])
        .env("OMRING_THREADS", "4")
        .output()
        .unwrap();
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn pump_cancellation_suppresses_left_mode() {
    let out = run_config("pump", &configs().join("pump_cancel.toml"), &[]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = body(&text);
    let cols: Vec<&str> = rows[0].split(',').collect();
    let vals: Vec<f64> = rows[1].split(',').map(|x| x.parse().unwrap()).collect();
    let idx = |n: &str| cols.iter().position(|c| *c == n).unwrap();
    assert!(vals[idx("abs_alpha_l2")] < 1e-24 * vals[idx("abs_alpha_r2")]);
}

#[test]
fn add_drop_verification_passes() {
    let out = run_config("verify", &configs().join("add_drop.toml"), &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(body(&text).iter().skip(1).all(|r| r.ends_with(",pass")));
}
