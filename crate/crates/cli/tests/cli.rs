use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const DELTA: &str = r#"{"dim":1,"support":[0,0],"B":[{"n":0,"block":[[1.5,0.0]]}]}"#;
const FREE: &str = r#"{"dim":1}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_jacobi-scatter"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(instance: &Path, args: &[&str]) -> Output {
    bin().arg("--instance").arg(instance).args(args).output().unwrap()
}

/// Rows of a CSV output, schema line and header stripped.
fn csv_rows(out: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# schema: jacobi-scatter/"));
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn spectrum_of_delta_instance() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "delta.json", DELTA);
    let (header, rows) = csv_rows(&run(&p, &["--command", "spectrum"]));
    assert_eq!(rows.len(), 3);
    let (lambda, diff) = (column(&header, "lambda"), column(&header, "agreement_diff"));
    for r in &rows {
        assert!((r[lambda].parse::<f64>().unwrap() - 2.5).abs() < 1e-8);
        assert!(r[diff].parse::<f64>().unwrap() <= 1e-6);
    }
}

#[test]
fn bound_of_delta_instance() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "delta.json", DELTA);
    let (header, rows) = csv_rows(&run(&p, &["--command", "bound", "--radius", "0.9"]));
    let r = &rows[0];
    assert!((r[column(&header, "product_lhs")].parse::<f64>().unwrap() - 1.8).abs() < 1e-9);
    assert_eq!(r[column(&header, "holds")], "true");
}

#[test]
fn report_on_free_instance() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "free.json", FREE);
    let (_, rows) = csv_rows(&run(&p, &["--command", "report"]));
    for r in &rows {
        if r[1].starts_with("residual") {
            assert!(r[2].parse::<f64>().unwrap() <= 1e-9, "{r:?}");
        }
        if r[1].starts_with("count_") && r[0] == "spectrum" {
            assert_eq!(r[2], "0");
        }
    }
}

#[test]
fn every_command_succeeds_on_delta() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "delta.json", DELTA);
    for cmd in ["validate", "jost", "wronskian", "scatter"] {
        let (_, rows) = csv_rows(&run(&p, &["--command", cmd, "--grid", "8"]));
        assert!(!rows.is_empty(), "{cmd}");
    }
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let gen = bin().args(["--command", "gen", "--seed", "11", "--dim", "2"]).output().unwrap();
    assert!(gen.status.success());
    let again = bin().args(["--command", "gen", "--seed", "11", "--dim", "2"]).output().unwrap();
    assert_eq!(gen.stdout, again.stdout);
    let p = write(&dir, "gen.json", std::str::from_utf8(&gen.stdout).unwrap());
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = run(&p, &["--command", "scatter", "--grid", "16", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn json_output_round_trips() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "delta.json", DELTA);
    let out = run(&p, &["--command", "jost", "--grid", "8", "--format", "json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["schema"], "jacobi-scatter/jost/v1");
    let reparsed: serde_json::Value = serde_json::from_str(&serde_json::to_string(&value).unwrap()).unwrap();
    assert_eq!(reparsed, value);

    let (header, rows) = csv_rows(&run(&p, &["--command", "jost", "--grid", "8"]));
    let json_rows = value["rows"].as_array().unwrap();
    assert_eq!(json_rows.len(), rows.len());
    let (re, im) = (column(&header, "value_re"), column(&header, "value_im"));
    for (j, c) in json_rows.iter().zip(&rows) {
        let v = j[5].as_array().unwrap();
        assert_eq!(v[0].as_f64().unwrap(), c[re].parse::<f64>().unwrap());
        assert_eq!(v[1].as_f64().unwrap(), c[im].parse::<f64>().unwrap());
    }
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"dim":1,"support":[0,0],"B":[{"n":0,"block":[[1.5,0.3]]}]}"#);
    assert_eq!(run(&bad, &["--command", "validate"]).status.code(), Some(1));
    let singular = write(&dir, "sing.json", r#"{"dim":1,"support":[0,0],"A":[{"n":0,"block":[[0.0,0.0]]}]}"#);
    assert_eq!(run(&singular, &["--command", "validate"]).status.code(), Some(1));
    let ambiguous = write(
        &dir,
        "amb.json",
        r#"{"dim":2,"support":[0,0],"B":[{"n":0,"block":[[1.5,0.0],[0.0,0.0],[0.0,0.0],[5e-8,0.0]]}]}"#,
    );
    assert_eq!(run(&ambiguous, &["--command", "scatter", "--grid", "4"]).status.code(), Some(2));
    assert_eq!(bin().args(["--command", "nonsense"]).output().unwrap().status.code(), Some(1));
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&missing, &["--command", "validate"]).status.code(), Some(1));
}

#[test]
fn radius_outside_range_is_rejected() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "delta.json", DELTA);
    assert_eq!(run(&p, &["--command", "jost", "--radius", "1.5"]).status.code(), Some(1));
    let ok = run(&p, &["--command", "jost", "--radius", "1.2", "--eps", "1.0", "--grid", "4"]);
    assert!(ok.status.success());
}
