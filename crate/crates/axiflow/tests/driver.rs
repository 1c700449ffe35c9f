//! Run directories, configuration parsing and surface mesh export.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use approx::assert_abs_diff_eq;
use axiflow::driver::{run, RunConfig};
use axiflow::functionals::surface_area;
use axiflow::geometry::{BoundaryClass, GeneratingCurve, Topology, Vec2};
use axiflow::mesh::{export_revolved, read_snapshot};
use axiflow::{make_preset, Error, Preset};
use tempfile::tempdir;

fn semicircle_config(extra: &str) -> RunConfig {
    let text = format!(
        r#"{{
            "curve": {{ "preset": {{ "kind": "perturbed_semicircle", "elements": 16 }} }},
            "scheme": "kappa",
            "params": {{ "kbar": -1.0 }},
            "dt": {{ "mesh_scaled": 0.1 }}
            {extra}
        }}"#
    );
    RunConfig::from_json(&text).unwrap()
}

fn count_rows(path: &Path) -> usize {
    csv::Reader::from_path(path).unwrap().records().count()
}

fn snapshot_names(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir.join("snapshots"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    names
}

#[test]
fn zero_steps_write_one_row_and_one_snapshot() {
    let dir = tempdir().unwrap();
    let summary = run(semicircle_config(r#", "steps": 0"#), dir.path()).unwrap();
    assert_eq!(summary.steps, 0);
    assert_eq!(count_rows(&dir.path().join("diagnostics.csv")), 1);
    assert_eq!(snapshot_names(dir.path()), ["snapshot_000000.csv"]);
    assert!(dir.path().join("final.obj").exists());
    assert!(dir.path().join("summary.json").exists());
}

#[test]
fn diagnostics_and_snapshots_follow_the_step_count() {
    let dir = tempdir().unwrap();
    run(
        semicircle_config(r#", "steps": 7, "snapshot_every": 3"#),
        dir.path(),
    )
    .unwrap();
    let diag = dir.path().join("diagnostics.csv");
    let mut reader = csv::Reader::from_path(&diag).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "step",
            "time",
            "energy",
            "ratio",
            "area",
            "volume",
            "hyp_length",
            "turning",
            "ade",
            "lambda_A",
            "lambda_V",
            "newton_iters"
        ]
    );
    assert_eq!(count_rows(&diag), 8);
    assert_eq!(
        snapshot_names(dir.path()),
        [
            "snapshot_000000.csv",
            "snapshot_000003.csv",
            "snapshot_000006.csv",
            "snapshot_000007.csv"
        ]
    );
    let nodes =
        read_snapshot(fs::File::open(dir.path().join("snapshots/snapshot_000007.csv")).unwrap())
            .unwrap();
    assert_eq!(nodes.len(), 17);
    assert_eq!(nodes[0].x, 0.0);
}

#[test]
fn final_time_is_hit_exactly() {
    let dir = tempdir().unwrap();
    let summary = run(semicircle_config(r#", "t_end": 0.01"#), dir.path()).unwrap();
    assert_eq!(summary.final_time, 0.01);
    assert_eq!(summary.steps, (0.01 / summary.dt).ceil() as usize);
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempdir().unwrap(), tempdir().unwrap());
    let config = semicircle_config(r#", "steps": 12, "snapshot_every": 4"#);
    run(config.clone(), a.path()).unwrap();
    run(config, b.path()).unwrap();
    for file in [
        "diagnostics.csv",
        "summary.json",
        "final.obj",
        "snapshots/snapshot_000012.csv",
    ] {
        assert_eq!(
            fs::read(a.path().join(file)).unwrap(),
            fs::read(b.path().join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn sphere_reference_reports_error_norms() {
    let dir = tempdir().unwrap();
    let config =
        semicircle_config(r#", "steps": 5, "reference_sphere": { "kbar": -1.0, "r0": 1.0 }"#);
    let summary = run(config, dir.path()).unwrap();
    let norms = summary.error_norms.unwrap();
    assert!(norms.linf > 0.0 && norms.linf < 0.1);
    assert!(norms.linf_l2 <= norms.linf);
}

#[test]
fn scheme_failure_writes_a_report_and_the_last_state() {
    let dir = tempdir().unwrap();
    let config = RunConfig::from_json(
        r#"{
            "curve": { "preset": { "kind": "segment", "elements": 8, "from": [1.0, 0.0], "to": [3.0, 0.0] } },
            "boundary": [{ "clamped": { "angle": 0.0 } }, { "clamped": { "angle": 0.0 } }],
            "scheme": "kappa",
            "dt": { "fixed": 0.001 },
            "steps": 3
        }"#,
    )
    .unwrap();
    let failure = run(config, dir.path()).unwrap_err();
    assert!(matches!(failure.error, Error::SingularSystem { .. }));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("failure.json")).unwrap())
            .unwrap();
    assert_eq!(report["error"], "SingularSystem");
    assert_eq!(report["step"], 1);
    let last = read_snapshot(fs::File::open(dir.path().join("last_state.csv")).unwrap()).unwrap();
    assert_eq!(last.len(), 9);
    assert!(dir.path().join("last_state.json").exists());
    assert_eq!(count_rows(&dir.path().join("diagnostics.csv")), 1);
}

#[test]
fn invalid_configurations_are_rejected() {
    let both = r#", "steps": 3, "t_end": 1.0"#;
    let dir = tempdir().unwrap();
    assert!(matches!(
        run(semicircle_config(both), dir.path()).unwrap_err().error,
        Error::InvalidConfig(_)
    ));
    assert!(matches!(
        run(semicircle_config(""), dir.path()).unwrap_err().error,
        Error::InvalidConfig(_)
    ));
    assert!(RunConfig::from_json(r#"{ "curve": 1 }"#).is_err());
    let unknown = semicircle_config(r#", "steps": 1"#);
    let mut text = serde_json::to_value(&unknown).unwrap();
    text["colour"] = serde_json::json!("blue");
    assert!(matches!(
        RunConfig::from_json(&text.to_string()),
        Err(Error::Json(_))
    ));
    // Conservation is only available for the curvature scheme.
    let s = RunConfig {
        scheme: axiflow::SchemeKind::KappaSExact,
        conservation: axiflow::ConservationMode::Area,
        ..semicircle_config(r#", "steps": 1"#)
    };
    assert!(matches!(
        run(s, dir.path()).unwrap_err().error,
        Error::InvalidConfig(_)
    ));
}

#[test]
fn curve_files_resolve_relative_to_the_config() {
    let dir = tempdir().unwrap();
    run(
        semicircle_config(r#", "steps": 2, "snapshot_every": 1"#),
        &dir.path().join("first"),
    )
    .unwrap();
    let config = r#"{
        "curve": { "file": {
            "path": "first/snapshots/snapshot_000002.csv",
            "topology": { "interval": { "start": "axis", "end": "axis" } }
        } },
        "scheme": "kappa_s_exact",
        "params": { "kbar": -1.0 },
        "dt": { "fixed": 1e-4 },
        "steps": 2
    }"#;
    let path = dir.path().join("restart.json");
    fs::write(&path, config).unwrap();
    let summary = run(
        RunConfig::from_file(&path).unwrap(),
        &dir.path().join("second"),
    )
    .unwrap();
    assert_eq!(summary.steps, 2);
}

#[test]
fn two_element_semicircle_mesh_counts() {
    let curve = GeneratingCurve::new(
        vec![
            Vec2::new(0.0, 1.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, -1.0),
        ],
        Topology::Interval {
            start: BoundaryClass::Axis,
            end: BoundaryClass::Axis,
        },
    )
    .unwrap();
    let mesh = export_revolved(&curve, 4).unwrap();
    assert_eq!(mesh.vertices.len(), 6);
    assert_eq!(mesh.triangles.len(), 8);
    assert_eq!(mesh.euler_characteristic(), 2);
    let mut obj = vec![];
    mesh.write_obj(&mut obj).unwrap();
    let text = String::from_utf8(obj).unwrap();
    let faces: Vec<usize> = text
        .lines()
        .filter(|l| l.starts_with("f "))
        .flat_map(|l| {
            l[2..]
                .split_whitespace()
                .map(|v| v.parse::<usize>().unwrap())
                .collect::<Vec<_>>()
        })
        .collect();
    assert_eq!(faces.iter().min(), Some(&1));
    assert_eq!(faces.iter().max(), Some(&6));
    assert!(matches!(
        export_revolved(&curve, 2),
        Err(Error::InvalidConfig(_))
    ));
}

#[test]
fn torus_mesh_has_vanishing_euler_characteristic() {
    let curve = make_preset(&Preset::Circle {
        elements: 24,
        center: [2.0, 0.0],
        radius: 1.0,
        clockwise: true,
    })
    .unwrap();
    let mesh = export_revolved(&curve, 32).unwrap();
    assert_eq!(mesh.euler_characteristic(), 0);
    assert_eq!(mesh.vertices.len(), 24 * 32);
    assert_eq!(mesh.triangles.len(), 2 * 24 * 32);
}

#[test]
fn mesh_area_approaches_the_surface_area() {
    let curve = make_preset(&Preset::PerturbedSemicircle { elements: 64 }).unwrap();
    let exact = surface_area(&curve);
    let coarse = (export_revolved(&curve, 64).unwrap().area() - exact).abs();
    let fine = (export_revolved(&curve, 256).unwrap().area() - exact).abs();
    assert!(fine < coarse / 10.0, "{coarse} {fine}");
    assert_abs_diff_eq!(
        export_revolved(&curve, 1024).unwrap().area(),
        4.0 * PI,
        epsilon = 1e-2
    );
}

#[test]
fn mesh_normals_point_outwards() {
    // For an outward orientation the signed volume (divergence theorem) of
    // the closed triangle mesh is positive.
    let curve = make_preset(&Preset::PerturbedSemicircle { elements: 32 }).unwrap();
    let mesh = export_revolved(&curve, 48).unwrap();
    let volume: f64 = mesh
        .triangles
        .iter()
        .map(|t| {
            let [a, b, c] = t.map(|i| nalgebra::Vector3::from(mesh.vertices[i]));
            a.dot(&b.cross(&c)) / 6.0
        })
        .sum();
    assert_abs_diff_eq!(volume, 4.0 * PI / 3.0, epsilon = 0.05);
}
