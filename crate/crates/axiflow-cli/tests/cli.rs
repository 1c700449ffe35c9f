//! End-to-end runs of the `axiflow` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn axiflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_axiflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SEMICIRCLE: &str = r#"{
    "curve": { "preset": { "kind": "perturbed_semicircle", "elements": 16 } },
    "scheme": "kappa_s_exact",
    "params": { "kbar": -1.0 },
    "dt": { "mesh_scaled": 0.1 },
    "steps": 4,
    "snapshot_every": 2
}"#;

#[test]
fn run_writes_the_run_directory() {
    let dir = tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(&config, SEMICIRCLE).unwrap();
    let out = dir.path().join("out");
    let result = axiflow(&["run", "--config", path(&config), "--out", path(&out)]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    assert!(String::from_utf8_lossy(&result.stdout).contains("4 steps"));
    for file in [
        "diagnostics.csv",
        "summary.json",
        "final.obj",
        "snapshots/snapshot_000004.csv",
    ] {
        assert!(out.join(file).exists(), "{file}");
    }
}

#[test]
fn export_revolves_a_snapshot() {
    let dir = tempdir().unwrap();
    let snapshot = dir.path().join("semicircle.csv");
    fs::write(&snapshot, "index,x1,x2\n0,0,1\n1,1,0\n2,0,-1\n").unwrap();
    let obj = dir.path().join("sphere.obj");
    let result = axiflow(&[
        "export",
        "--snapshot",
        path(&snapshot),
        "--ktheta",
        "4",
        "--obj",
        path(&obj),
    ]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    let text = fs::read_to_string(&obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 6);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 8);
}

#[test]
fn export_of_a_periodic_snapshot() {
    let dir = tempdir().unwrap();
    let snapshot = dir.path().join("square.csv");
    fs::write(&snapshot, "index,x1,x2\n0,3,0\n1,2,-1\n2,1,0\n3,2,1\n").unwrap();
    let obj = dir.path().join("torus.obj");
    let result = axiflow(&[
        "export",
        "--snapshot",
        path(&snapshot),
        "--obj",
        path(&obj),
        "--periodic",
    ]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    assert!(String::from_utf8_lossy(&result.stdout).starts_with("256 vertices, 512 triangles"));
}

#[test]
fn presets_are_listed() {
    let result = axiflow(&["presets", "list"]);
    assert!(result.status.success());
    let text = String::from_utf8_lossy(&result.stdout);
    for name in [
        "perturbed_semicircle",
        "cigar",
        "two_circles",
        "lemniscate",
        "flat_disc",
    ] {
        assert!(text.contains(name), "{name}");
    }
}

#[test]
fn errors_are_reported_as_json() {
    let dir = tempdir().unwrap();
    let config = dir.path().join("bad.json");
    fs::write(&config, r#"{ "curve": 3 }"#).unwrap();
    let result = axiflow(&[
        "run",
        "--config",
        path(&config),
        "--out",
        path(&dir.path().join("o")),
    ]);
    assert!(!result.status.success());
    let err: serde_json::Value = serde_json::from_slice(&result.stderr).unwrap();
    assert_eq!(err["error"], "Json");

    let missing = axiflow(&[
        "run",
        "--config",
        path(&dir.path().join("nope.json")),
        "--out",
        "x",
    ]);
    assert!(!missing.status.success());
    let err: serde_json::Value = serde_json::from_slice(&missing.stderr).unwrap();
    assert_eq!(err["error"], "Io");
}

#[test]
fn scheme_failures_exit_with_the_failure_report() {
    let dir = tempdir().unwrap();
    let config = dir.path().join("line.json");
    fs::write(
        &config,
        r#"{
            "curve": { "preset": { "kind": "segment", "elements": 8, "from": [1.0, 0.0], "to": [3.0, 0.0] } },
            "boundary": [{ "clamped": { "angle": 0.0 } }, { "clamped": { "angle": 0.0 } }],
            "scheme": "kappa",
            "dt": { "fixed": 0.001 },
            "steps": 2
        }"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let result = axiflow(&["run", "--config", path(&config), "--out", path(&out)]);
    assert!(!result.status.success());
    let err: serde_json::Value = serde_json::from_slice(&result.stderr).unwrap();
    assert_eq!(err["error"], "SingularSystem");
    assert!(out.join("failure.json").exists());
}
