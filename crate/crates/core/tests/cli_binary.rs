use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spectra-census"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn error_code(out: &Path) -> String {
    let record: Value = serde_json::from_str(&fs::read_to_string(out.join("error.json")).unwrap()).unwrap();
    record["code"].as_str().unwrap().to_string()
}

#[test]
fn validate_succeeds_on_shipped_config() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["validate", "--config"])
        .arg(configs().join("validate.json"))
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("validation.csv").exists());
    let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("MANIFEST.json")).unwrap()).unwrap();
    assert_eq!(manifest["experiment"], "validate");
}

#[test]
fn census_writes_series_and_spectra() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        json!({
            "experiment": "census-jordan",
            "representation": {"builder": "schottky_pair", "stretch": 3.0, "separation": 2.5},
            "region": {"type": "ball"},
            "t_grid": {"t_min": 1.0, "t_max": 12.0, "step": 1.0},
            "l_max": 6
        })
        .to_string(),
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .args(["census-jordan", "--dump-spectra", "--workers", "2", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let series = fs::read_to_string(out.join("series.csv")).unwrap();
    assert_eq!(series.lines().next().unwrap(), "T,count,trusted,kind,region_id");
    assert_eq!(series.lines().count(), 13);
    assert!(out.join("spectra.csv").exists());
}

#[test]
fn box_dimension_mismatch_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        json!({
            "experiment": "census-box",
            "representation": {"builder": "schottky_pair", "stretch": 3.0, "separation": 2.5},
            "direction": [0.6, 0.8],
            "widths": [1.0, 1.0],
            "t_grid": {"t_min": 1.0, "t_max": 10.0, "step": 1.0},
            "l_max": 6
        })
        .to_string(),
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = bin().args(["census-box", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(!status.success());
    assert_eq!(error_code(&out), "cli.SchemaError");
}

#[test]
fn failed_ping_pong_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        json!({
            "experiment": "validate",
            "representation": {"builder": "schottky_pair", "stretch": 1.2, "separation": 0.1}
        })
        .to_string(),
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = bin().args(["validate", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(!status.success());
    assert_eq!(error_code(&out), "reps.PingPongFailure");
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, json!({"experiment": "validate", "representation": {}, "bogus": 1}).to_string()).unwrap();
    let out = dir.path().join("out");
    let status = bin().args(["validate", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(!status.success());
    assert_eq!(error_code(&out), "cli.SchemaError");
}
