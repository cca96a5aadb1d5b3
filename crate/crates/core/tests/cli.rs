use std::process::Command;

use ysurface::geometry::{make_catenoid, Resolution};
use ysurface::mesh_io::{to_json, MeshDocument};

fn ysurface(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ysurface")).args(args).env("YSURFACE_THREADS", "1").output().unwrap()
}

#[test]
fn generate_round_trips_through_file() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let out = ysurface(&["generate", "--surface", "ycatenoid", "--trunc-u", "2", "--h", "0.1", "--out", a.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ok"));
    let file = format!("file:{}", a.display());
    let out = ysurface(&["generate", "--surface", &file, "--out", b.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn index_report_schema_and_determinism() {
    let run = |threads: &str| ysurface(&["index", "--surface", "catenoid", "--half-height", "1.5", "--h", "0.1", "--threads", threads]);
    let one = run("1");
    assert!(one.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(doc["spectrum"]["index"], 1);
    for key in ["eigenvalues", "nullity_truncated", "zero_tolerance"] {
        assert!(!doc["spectrum"][key].is_null(), "missing {key}");
    }
    assert_eq!(one.stdout, run("1").stdout);
}

#[test]
fn classify_contradiction_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("theta.json");
    let pi = std::f64::consts::PI;
    std::fs::write(&p, format!("{{\"theta\": [{}, {}, {}]}}", -3.0 * pi, -3.0 * pi, -pi)).unwrap();
    let out = ysurface(&["classify", "--theta-file", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["verdict"]["conclusion_text"], "contradiction: index ≥ 2");
    assert_eq!(doc["theta"]["negative_count"], 2);
    assert!(doc["verdict"]["rules"].as_array().is_some_and(|r| !r.is_empty()));
}

#[test]
fn classify_meshed_ycatenoid() {
    let out = ysurface(&["classify", "--surface", "ycatenoid", "--trunc-u", "4", "--h", "0.08"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["verdict"]["conclusion_text"], "Y-catenoid");
    assert_eq!(doc["theta"]["per_face"].as_array().unwrap().len(), 3);
}

#[test]
fn structural_errors_exit_two() {
    let out = ysurface(&["classify", "--surface", "flat_ycone", "--h", "0.25"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not compact"));
    let out = ysurface(&["index", "--h", "-0.1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_writes_both_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("flat.csv");
    let out = ysurface(&["sweep", "--surface", "flat_ycone", "--h", "0.2", "--r-list", "0.5,1", "--out", p.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&p).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("R,h,mode,eigenvalue_rank,eigenvalue,index,nullity,status"));
    assert!(lines.all(|l| l.split(',').nth(5) == Some("0")));
    let conv = std::fs::read_to_string(dir.path().join("flat_convergence.csv")).unwrap();
    assert!(conv.starts_with("R,Q_value,theta_prediction,gap"));
}

#[test]
fn verify_default_passes_and_coarse_mesh_fails() {
    let out = ysurface(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let out = ysurface(&["verify", "--h", "0.3"]);
    assert_eq!(out.status.code(), Some(1));
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.lines().any(|l| l.starts_with("FAIL") && l.contains("Gauss–Bonnet")), "{table}");
}

#[test]
fn verify_reports_corrupted_normal() {
    let s = make_catenoid(1.0, 1.0, Resolution::new(0.1)).unwrap();
    let mut doc: MeshDocument = serde_json::from_str(&to_json(&s).unwrap()).unwrap();
    doc.faces[0].normal[17] = [0.0, 0.0, 2.0];
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = ysurface(&["verify", "--surface", &format!("file:{}", p.display())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("node 17"));
}
