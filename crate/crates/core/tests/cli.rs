//! Exit-code and error-path contract of the command line.

use std::process::Command;

fn dikin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dikin"))
}

fn body_file(name: &str) -> String {
    format!("{}/../../bodies/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn missing_required_flag_exits_one_with_usage() {
    let out = dikin().args(["sample", "--steps", "10"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("--body"), "stderr: {text}");
    assert!(text.to_lowercase().contains("usage"), "stderr: {text}");
}

#[test]
fn unknown_subcommand_exits_one() {
    let out = dikin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_body_document_exits_one_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"dimension":1,"linear":{"A":[[1],[-1]],"b":[1,-1]}}"#).unwrap();
    let out = dikin()
        .args(["check", "--body", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("linear.b"));
}

#[test]
fn unbounded_body_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("slab.json");
    // A slab: benchmark's hit-and-run leg needs chords and must fail.
    std::fs::write(
        &path,
        r#"{"dimension":2,"linear":{"A":[[1,0],[-1,0]],"b":[1,1]}}"#,
    )
    .unwrap();
    let out = dikin()
        .args([
            "benchmark",
            "--body",
            path.to_str().unwrap(),
            "--walks",
            "hitrun",
            "--steps",
            "50",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exhausted_budget_exits_three_but_writes_the_result() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("result.json");
    let out = dikin()
        .args([
            "optimize",
            "--body",
            &body_file("interval.json"),
            "--objective",
            "1",
            "--eps",
            "0.05",
            "--delta",
            "0.1",
            "--s",
            "1",
            "--hard-cap",
            "3",
            "--out",
            out_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.contains("budget_exhausted"));
    assert!(dir.path().join("result.json.manifest.json").exists());
}

#[test]
fn ball_walk_without_delta_is_a_usage_error() {
    let out = dikin()
        .args([
            "benchmark",
            "--body",
            &body_file("square.json"),
            "--walks",
            "ball",
            "--steps",
            "100",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn diagnose_writes_plot_csvs_next_to_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = dikin()
        .args([
            "diagnose",
            "--body",
            &body_file("square.json"),
            "--steps",
            "4000",
            "--oracle",
            "5000",
            "--radius",
            "0.5",
            "--out",
            out_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_path.exists());
    let hist = std::fs::read_to_string(dir.path().join("report.json.histogram.csv")).unwrap();
    assert!(hist.starts_with("cell,walker,oracle"));
    assert_eq!(hist.lines().count(), 17); // header + 4x4 cells
    let auto = std::fs::read_to_string(dir.path().join("report.json.autocorr.csv")).unwrap();
    assert!(auto.starts_with("lag,rho"));
}

#[test]
fn sample_requires_out_and_produces_the_trio() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let out = dikin()
        .args([
            "sample",
            "--body",
            &body_file("interval.json"),
            "--steps",
            "500",
            "--seed",
            "2",
            "--out",
            csv.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(csv.exists());
    assert!(dir.path().join("s.csv.summary.json").exists());
    let manifest = std::fs::read_to_string(dir.path().join("s.csv.manifest.json")).unwrap();
    assert!(manifest.contains("\"command\": \"sample\""));
    assert!(manifest.contains("\"body_digest\""));
}
