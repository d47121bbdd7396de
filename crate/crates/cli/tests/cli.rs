use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn uptk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uptk")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = uptk(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn write_spec(dir: &Path, body: &str) -> String {
    let p = dir.join("spec.json");
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn verify_prints_a_report_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), r#"{"variant":"heisenberg_nd","dim":1,"q":2.0}"#);
    let out = ok(&["verify", "--spec", &spec, "--family", "gaussian:lambda=1,n=1", "--operator", r#"{"kind":"fourier","convention":"two_pi"}"#]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    // Gaussians attain V(f)V(f̂) = ‖f‖₂⁴/(16π²).
    let ratio = v["ratio"].as_f64().unwrap() / v["bound_constant"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() < 1e-6, "{ratio}");
}

#[test]
fn sweep_writes_json_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), r#"{"variant":"F_pq","dim":1,"p":1.0,"q":2.0}"#);
    let out = dir.path().join("out");
    ok(&[
        "sweep", "--spec", &spec, "--family", "gc:c=1", "--param", "c", "--logspace", "0.05,1,6",
        "--operator", r#"{"kind":"fourier","convention":"two_pi"}"#, "--out", out.to_str().unwrap(), "--plot",
    ]);
    let v = read_json(&out.join("sweep.json"));
    assert_eq!(v["result"]["values"].as_array().unwrap().len(), 6);
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.starts_with("c,value"));
    assert!(fs::read_to_string(out.join("sweep.svg")).unwrap().contains("<svg"));
}

#[test]
fn json_out_path_names_companions() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("nested/run.json");
    ok(&["sequence", "--prop", "three_gc", "--dim", "3", "--q", "8", "--logspace", "0.05,0.5,5", "--out", report.to_str().unwrap()]);
    assert!(report.exists());
    assert!(dir.path().join("nested/run.csv").exists());
}

#[test]
fn minimize_is_reproducible_and_writes_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), r#"{"variant":"F_pq","dim":1,"p":1.0,"q":2.0}"#);
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        ok(&[
            "minimize", "--spec", &spec, "--family", "gc:c=0.5", "--params", "c,dilation", "--bounds", "0.1:1,0.5:2",
            "--budget", "60", "--seed", "3", "--operator", r#"{"kind":"fourier","convention":"two_pi"}"#,
            "--out", out.to_str().unwrap(),
        ]);
        (fs::read_to_string(out.join("minimize.json")).unwrap(), out)
    };
    let (a, out) = run("a");
    let (b, _) = run("b");
    assert_eq!(a, b);
    assert!(fs::read_to_string(out.join("trace.csv")).unwrap().lines().count() > 1);
}

#[test]
fn classify_a_random_testset() {
    let out = ok(&["classify", "--operator", r#"{"kind":"fourier","convention":"two_pi"}"#, "--testset", "random:8", "--seed", "4"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.is_object());
}

#[test]
fn invalid_spec_exits_nonzero_with_the_constraint() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), r#"{"variant":"generalized_up","dim":1,"p":3.0,"q":4.0}"#);
    let out = uptk(&["verify", "--spec", &spec, "--family", "gaussian:lambda=1,n=1", "--operator", r#"{"kind":"fourier","convention":"two_pi"}"#]);
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_testset_is_rejected() {
    let out = uptk(&["classify", "--operator", r#"{"kind":"fourier","convention":"two_pi"}"#, "--testset", "nope"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown test set"));
}
