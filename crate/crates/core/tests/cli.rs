use std::path::Path;
use std::process::{Command, Output};

use cran_rf::{Error, ForestModel, ScenarioConfig};

fn cran_rf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cran-rf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn unknown_config_key_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "schema_version = 1\n[geometry]\ndomain_size = 50.0\n").unwrap();
    assert!(matches!(ScenarioConfig::load(&cfg), Err(Error::Config(_))));
    let out = cran_rf(&["dimension", "--config", arg(&cfg), "--out", arg(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("domain_size"), "{err}");
}

#[test]
fn wrong_schema_version_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("old.toml");
    std::fs::write(&cfg, "schema_version = 0\n").unwrap();
    assert!(matches!(
        ScenarioConfig::load(&cfg),
        Err(Error::Version { found: 0, .. })
    ));
    let out = cran_rf(&[
        "train",
        "--config",
        arg(&cfg),
        "--out",
        arg(&dir.path().join("m.txt")),
    ]);
    assert!(!out.status.success());
}

#[test]
fn unknown_mode_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = cran_rf(&["sweep", "--mode", "weather", "--out", arg(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn written_default_config_loads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("default.toml");
    std::fs::write(&cfg, ScenarioConfig::default().to_toml()).unwrap();
    assert_eq!(
        ScenarioConfig::load(&cfg).unwrap(),
        ScenarioConfig::default()
    );
}

#[test]
fn generate_train_and_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    let model = dir.path().join("model.txt");
    let report = dir.path().join("report");
    let out = cran_rf(&[
        "gen-data",
        "--samples",
        "400",
        "--seed",
        "3",
        "--out",
        arg(&data),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let lines = std::fs::read_to_string(&data).unwrap().lines().count();
    assert_eq!(lines, 401);

    let out = cran_rf(&[
        "train",
        "--data",
        arg(&data),
        "--seed",
        "3",
        "--out",
        arg(&model),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let m = ForestModel::load(&model).unwrap();
    assert_eq!(m.train_seed, 3);

    let out = cran_rf(&[
        "eval",
        "--model",
        arg(&model),
        "--drops",
        "3",
        "--out",
        arg(&report),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(
        table.contains("csi") && table.contains("learning"),
        "{table}"
    );
    assert!(std::fs::read_dir(&report).unwrap().count() > 0);
}
