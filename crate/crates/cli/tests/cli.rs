//! End-to-end checks of the binary: exit codes, file schemas, determinism.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coherent2d"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn check_passes_on_default_parameters() {
    let out = run(&["check"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("\"passed\":true"));
    assert!(text.contains("\"name\":\"normalization\""));
    assert!(text.contains("\"name\":\"eigenrelation_first\""));
}

#[test]
fn check_csv_format_lists_every_check() {
    let out = run(&["check", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("name,residual,tolerance,passed\n"));
    assert!(text.lines().count() > 10);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn corrupted_amplitude_fails_with_exit_one() {
    let out = run(&["check", "--corrupt-amplitude", "0.01"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("\"passed\":false"));
}

#[test]
fn invalid_alpha_exits_two() {
    let out = run(&["check", "--alpha-re", "1.2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reversed_time_interval_exits_two() {
    let out = run(&["evolve", "--t0", "1.0", "--t1", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_exits_two() {
    let out = run(&["evolve", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn near_boundary_alpha_reports_resource_limit() {
    let out = run(&["check", "--alpha-re", "0.95"]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
}

#[test]
fn evolve_reports_constant_rs_determinant_and_revival() {
    let out = run(&[
        "evolve",
        "--alpha-re",
        "0.4",
        "--beta-re",
        "5",
        "--chirality",
        "left",
        "--steps",
        "8",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 9);
    for r in &rows {
        assert!((r[col("rs_x_closed")] - 0.25).abs() < 1e-14);
        assert!((r[col("rs_x_quad")] - 0.25).abs() < 1e-6);
        assert!(r[col("qx_absdiff")] < 1e-7);
        assert!(r[col("dpx2_absdiff")] < 1e-7);
    }
    // width range over the sweep matches the oscillation bounds
    let dx2: Vec<f64> = rows.iter().map(|r| r[col("dx2_closed")]).collect();
    let lo = dx2.iter().cloned().fold(f64::MAX, f64::min);
    let hi = dx2.iter().cloned().fold(f64::MIN, f64::max);
    assert!((lo - 0.5 * 0.6 / 1.4).abs() < 1e-12);
    assert!((hi - 0.5 * 1.4 / 0.6).abs() < 1e-12);
    // endpoints of the period are identical records
    let first = &rows[0];
    let last = &rows[rows.len() - 1];
    for name in ["qx_closed", "qy_closed", "px_closed", "dx2_closed"] {
        assert!((first[col(name)] - last[col(name)]).abs() < 1e-10);
    }
}

#[test]
fn density_export_writes_all_files_with_contours() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("fig");
    let out = run(&[
        "density",
        "--alpha-re",
        "0.4",
        "--beta-re",
        "5",
        "--chirality",
        "left",
        "--steps",
        "1",
        "--t1",
        "0.5",
        "--lattice",
        "101",
        "--out",
        base.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let density = std::fs::read_to_string(dir.path().join("fig.density.csv")).unwrap();
    assert!(density.starts_with("x,y,t,density\n"));
    assert_eq!(density.lines().count(), 1 + 2 * 101 * 101);

    let contours = std::fs::read_to_string(dir.path().join("fig.contours.csv")).unwrap();
    assert!(contours.starts_with("t,polyline,vertex,x,y\n"));
    assert!(contours.lines().count() > 20, "contour should be nonempty");
    // the t = 0 contour surrounds the packet center near (25/7, 0)
    let mut cx = 0.0;
    let mut cy = 0.0;
    let mut count = 0.0;
    for line in contours.lines().skip(1) {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        if cells[0] == 0.0 {
            cx += cells[3];
            cy += cells[4];
            count += 1.0;
        }
    }
    cx /= count;
    cy /= count;
    assert!((cx - 25.0 / 7.0).abs() < 0.5, "contour centroid x = {cx}");
    assert!(cy.abs() < 0.5, "contour centroid y = {cy}");

    let ellipse = std::fs::read_to_string(dir.path().join("fig.ellipse.csv")).unwrap();
    assert!(ellipse.starts_with("polyline,vertex,x,y\n"));
    assert_eq!(ellipse.lines().count(), 1 + 129);
}

#[test]
fn density_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args_for = |name: &str| {
        let base = dir.path().join(name);
        vec![
            "density".to_string(),
            "--steps".into(),
            "1".into(),
            "--lattice".into(),
            "61".into(),
            "--format".into(),
            "json".into(),
            "--out".into(),
            base.to_str().unwrap().to_string(),
        ]
    };
    let a1: Vec<String> = args_for("a");
    let a2: Vec<String> = args_for("b");
    assert!(bin().args(&a1).status().unwrap().success());
    assert!(bin().args(&a2).status().unwrap().success());
    let f1 = std::fs::read(dir.path().join("a")).unwrap();
    let f2 = std::fs::read(dir.path().join("b")).unwrap();
    assert_eq!(f1, f2, "identical configs must produce byte-identical output");
    assert!(!f1.is_empty());
}

#[test]
fn threshold_above_peak_warns_and_writes_empty_contours() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("hi");
    let out = run(&[
        "density",
        "--alpha-re",
        "0",
        "--beta-re",
        "0",
        "--steps",
        "1",
        "--lattice",
        "41",
        "--threshold",
        "10",
        "--out",
        base.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let contours = std::fs::read_to_string(dir.path().join("hi.contours.csv")).unwrap();
    assert_eq!(contours.lines().count(), 1, "header only");
}

#[test]
fn evolve_json_mirrors_the_csv_fields() {
    let out = run(&["evolve", "--steps", "2", "--format", "json"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with('['));
    for key in ["\"t\":", "\"qx_closed\":", "\"qx_quad\":", "\"qx_absdiff\":", "\"rs_y_quad\":"] {
        assert!(text.contains(key), "missing {key}");
    }
}
