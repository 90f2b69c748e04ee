//! End-to-end runs of the command-line driver.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn daugavet(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_daugavet"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn build_writes_a_deterministic_manifest() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = daugavet(d.path(), &["build"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let manifest = fs::read_to_string(a.path().join("tower/manifest.json")).unwrap();
    assert_eq!(manifest, fs::read_to_string(b.path().join("tower/manifest.json")).unwrap());
    let parsed: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    assert_eq!(parsed["stages"].as_array().unwrap().len(), 2);
    for f in ["stage-1-basis.txt", "stage-2-basis.txt", "stage-1-net.txt"] {
        assert_eq!(
            fs::read(a.path().join("tower").join(f)).unwrap(),
            fs::read(b.path().join("tower").join(f)).unwrap()
        );
    }
}

#[test]
fn single_stage_config_builds_the_trivial_tower() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[tower]\neps1 = \"3/4\"\nmax_stage = 1\n").unwrap();
    let o = daugavet(dir.path(), &["--config", cfg.to_str().unwrap(), "build"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("stage ")).count(), 1);
}

#[test]
fn a_tiny_cell_cap_is_a_clean_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = daugavet(dir.path(), &["--max-cells", "16", "build"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("above the cap of 16"));
}

#[test]
fn bad_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(daugavet(dir.path(), &["verify", "nonsense"]).status.code(), Some(2));
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[tower]\neps1 = \"3/4\"\nratio = \"2/3\"\n").unwrap();
    assert_eq!(daugavet(dir.path(), &["--config", cfg.to_str().unwrap(), "build"]).status.code(), Some(2));
}

#[test]
fn verify_report_and_certificate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();

    let empty = daugavet(p, &["report"]);
    assert!(empty.status.success());
    assert_eq!(fs::read_to_string(p.join("summary.csv")).unwrap(), "suite,anchor,case,status,quantities\n");

    let o = daugavet(p, &["--seed", "3", "verify", "kyfan"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = daugavet(p, &["verify", "daug-certificate"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("precondition-unmet"));

    assert!(daugavet(p, &["report"]).status.success());
    let first = fs::read(p.join("summary.csv")).unwrap();
    let first_json = fs::read(p.join("reports.json")).unwrap();
    assert!(daugavet(p, &["report"]).status.success());
    assert_eq!(first, fs::read(p.join("summary.csv")).unwrap());
    assert_eq!(first_json, fs::read(p.join("reports.json")).unwrap());
    let csv = String::from_utf8(first).unwrap();
    assert!(csv.contains("daug-certificate,daug-lower-bound"));
    assert!(csv.contains("kyfan,ky-fan-metric,symmetry,pass"));
    let reports = fs::read_to_string(p.join("reports/kyfan.json")).unwrap();
    assert!(reports.contains("\"seed\": 3"));

    let cert = p.join("certificate-n2.json");
    let ok = daugavet(p, &["check-certificate", cert.to_str().unwrap()]);
    assert!(ok.status.success(), "{}", stdout(&ok));

    let mut value: serde_json::Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    value["hulls"][0]["value"] = serde_json::Value::String("5/1".into());
    let bad = p.join("tampered.json");
    fs::write(&bad, serde_json::to_string(&value).unwrap()).unwrap();
    let o = daugavet(p, &["check-certificate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_is_deterministic_for_a_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        assert!(daugavet(d.path(), &["--seed", "9", "verify", "orthogonality"]).status.success());
    }
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("reports/orthogonality.json")).unwrap();
    assert_eq!(read(&a), read(&b));
}
