//! End-to-end checks of the modal binary: exit codes, printed reports, and
//! the files a run writes.

use std::path::{Path, PathBuf};
use std::process::Command;

fn modal(args: &[&str]) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_modal"))
        .args(args)
        .output()
        .expect("binary launches");
    (
        output.status.code().expect("no signal kills"),
        String::from_utf8_lossy(&output.stdout).into_owned(),
        String::from_utf8_lossy(&output.stderr).into_owned(),
    )
}

fn bundled(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
        .display()
        .to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).expect("test file writes");
    path
}

const TINY: &str = r#"{
  "name": "tiny",
  "kind": "custom",
  "complex": [["a", "b", "c"]],
  "layout": {"a": [0, 0], "b": [100, 0], "c": [50, 90]}
}"#;

#[test]
fn validate_reports_the_triage_census() {
    let (code, stdout, _) = modal(&["validate", &bundled("triage.json")]);
    assert_eq!(code, 0);
    assert!(stdout.contains("census: 7,12,7,1"));
    assert!(stdout.contains("valid: true"));
}

#[test]
fn validate_applies_closure_to_custom_face_lists() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"name": "pair", "kind": "custom", "complex": [["a", "b"]]}"#,
    );
    let (code, stdout, _) = modal(&["validate", config.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("census: 2,1"));
}

#[test]
fn validate_rejects_malformed_files_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.json", "{ not json");
    let (code, _, stderr) = modal(&["validate", config.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("error:"));
}

#[test]
fn validate_rejects_unknown_fields_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"name": "x", "kind": "custom", "complex": [["a"]], "colour": "red"}"#,
    );
    let (code, _, stderr) = modal(&["validate", config.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("colour"));
}

#[test]
fn validate_rejects_missing_files_with_exit_two() {
    let (code, _, _) = modal(&["validate", "/definitely/not/here.json"]);
    assert_eq!(code, 2);
}

#[test]
fn validate_rejects_a_bad_warn_margin_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"name": "x", "kind": "custom", "complex": [["a", "b"]],
            "thresholds": {"tau": 0.5, "eta": 0.6}}"#,
    );
    let (code, _, stderr) = modal(&["validate", config.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("warn margin"));
}

#[test]
fn validate_rejects_threshold_overrides_on_unknown_faces() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"name": "x", "kind": "custom", "complex": [["a", "b"]],
            "thresholds": {"overrides": [{"face": ["a", "z"], "tau": 0.3, "eta": 0.1}]}}"#,
    );
    let (code, _, stderr) = modal(&["validate", config.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("not a face"));
}

#[test]
fn validate_rejects_layouts_that_miss_vertices() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"name": "x", "kind": "custom", "complex": [["a", "b"]],
            "layout": {"a": [0, 0]}}"#,
    );
    let (code, _, stderr) = modal(&["validate", config.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("missing a position"));
}

#[test]
fn nerve_prints_the_four_set_example() {
    let dir = tempfile::tempdir().unwrap();
    let cover = write(
        dir.path(),
        "cover.json",
        r#"{"sets": {
            "alpha": ["s1", "s3"],
            "beta": ["s1", "s4"],
            "gamma": ["s1", "s2"],
            "delta": ["s2", "s5"]
        }}"#,
    );
    let (code, stdout, _) = modal(&["nerve", cover.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "{delta,gamma}\n{alpha,beta,gamma}\n");
}

#[test]
fn nerve_of_disjoint_sets_is_a_vertex_list() {
    let dir = tempfile::tempdir().unwrap();
    let cover = write(
        dir.path(),
        "cover.json",
        r#"{"sets": {"a": ["s1"], "b": ["s2"]}}"#,
    );
    let (code, stdout, _) = modal(&["nerve", cover.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "{a}\n{b}\n");
}

#[test]
fn nerve_of_nested_sets_is_an_edge() {
    let dir = tempfile::tempdir().unwrap();
    let cover = write(
        dir.path(),
        "cover.json",
        r#"{"sets": {"small": ["s1"], "large": ["s1", "s2"]}}"#,
    );
    let (code, stdout, _) = modal(&["nerve", cover.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "{large,small}\n");
}

#[test]
fn nerve_rejects_a_universe_the_sets_do_not_cover() {
    let dir = tempfile::tempdir().unwrap();
    let cover = write(
        dir.path(),
        "cover.json",
        r#"{"universe": ["s1", "s2"], "sets": {"a": ["s1"]}}"#,
    );
    let (code, _, stderr) = modal(&["nerve", cover.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("s2"));
}

#[test]
fn graph_counts_on_small_simplices() {
    let dir = tempfile::tempdir().unwrap();
    let two = write(
        dir.path(),
        "two.json",
        r#"{"name": "t", "kind": "custom", "complex": [["a", "b", "c"]]}"#,
    );
    let (code, stdout, _) = modal(&["graph", two.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("nodes: 7\nedges: 9\n"));
    assert!(stdout.contains("node 0 {a}"));

    let (code, stdout, _) = modal(&["graph", two.to_str().unwrap(), "--relation", "all"]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("nodes: 7\nedges: 12\n"));

    let three = write(
        dir.path(),
        "three.json",
        r#"{"name": "t", "kind": "custom", "complex": [["a", "b", "c", "d"]]}"#,
    );
    let (code, stdout, _) = modal(&["graph", three.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("nodes: 15\n"));

    let one = write(
        dir.path(),
        "one.json",
        r#"{"name": "t", "kind": "custom", "complex": [["a"]]}"#,
    );
    let (code, stdout, _) = modal(&["graph", one.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("nodes: 1\nedges: 0\n"));
}

#[test]
fn graph_rejects_an_unknown_relation_flag() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"name": "t", "kind": "custom", "complex": [["a"]]}"#,
    );
    let (code, _, _) = modal(&["graph", config.to_str().unwrap(), "--relation", "sideways"]);
    assert_eq!(code, 2);
}

#[test]
fn run_on_empty_evidence_writes_headers_only() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.json", TINY);
    let evidence = write(dir.path(), "e.jsonl", "");
    let out = dir.path().join("out");
    let (code, _, _) = modal(&[
        "run",
        config.to_str().unwrap(),
        evidence.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let trajectory = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert_eq!(trajectory, "tick,a,b,c\n");
    let events = std::fs::read_to_string(out.join("events.csv")).unwrap();
    assert_eq!(events, "tick,kind,from,to\n");
    assert!(out.join("trace.svg").exists());
}

#[test]
fn run_aborts_on_non_increasing_ticks_but_keeps_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.json", TINY);
    let evidence = write(
        dir.path(),
        "e.jsonl",
        concat!(
            "{\"tick\": 1, \"signals\": {\"a\": 1.0}}\n",
            "{\"tick\": 1, \"signals\": {\"b\": 1.0}}\n",
        ),
    );
    let out = dir.path().join("out");
    let (code, _, stderr) = modal(&[
        "run",
        config.to_str().unwrap(),
        evidence.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(stderr.contains("run aborted at tick 1"));
    let trajectory = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert_eq!(trajectory, "tick,a,b,c\n1,1,0,0\n");
    assert!(out.join("events.csv").exists());
    assert!(out.join("trace.svg").exists());
}

#[test]
fn run_rejects_a_malformed_evidence_line_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.json", TINY);
    let evidence = write(
        dir.path(),
        "e.jsonl",
        "{\"tick\": 0, \"signals\": {\"a\": 1.0}}\nnot json\n",
    );
    let out = dir.path().join("out");
    let (code, _, stderr) = modal(&[
        "run",
        config.to_str().unwrap(),
        evidence.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("line 2"));
    assert!(!out.join("trajectory.csv").exists());
}

#[test]
fn run_rejects_signals_that_name_no_vertex() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.json", TINY);
    let evidence = write(
        dir.path(),
        "e.jsonl",
        "{\"tick\": 0, \"signals\": {\"zed\": 1.0}}\n",
    );
    let out = dir.path().join("out");
    let (code, _, stderr) = modal(&[
        "run",
        config.to_str().unwrap(),
        evidence.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(stderr.contains("zed"));
}

#[test]
fn run_requires_checks_done_for_triage_records() {
    let dir = tempfile::tempdir().unwrap();
    let evidence = write(dir.path(), "e.jsonl", "{\"tick\": 0, \"signals\": {}}\n");
    let out = dir.path().join("out");
    let (code, _, stderr) = modal(&[
        "run",
        &bundled("triage.json"),
        evidence.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(stderr.contains("checks_done"));
}

#[test]
fn run_warns_on_stderr_when_an_oracle_exceeds_its_limit() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{
  "name": "tiny",
  "kind": "custom",
  "complex": [["a", "b", "c"]],
  "layout": {"a": [0, 0], "b": [100, 0], "c": [50, 90]},
  "oracle_limits": {"a": 1}
}"#,
    );
    let evidence = write(
        dir.path(),
        "e.jsonl",
        concat!(
            "{\"tick\": 0, \"signals\": {\"a\": 1.0}}\n",
            "{\"tick\": 1, \"signals\": {\"a\": 1.0}}\n",
        ),
    );
    let out = dir.path().join("out");
    let (code, _, stderr) = modal(&[
        "run",
        config.to_str().unwrap(),
        evidence.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stderr.contains("alarm: oracle a"));
}

#[test]
fn run_skips_blank_evidence_lines() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.json", TINY);
    let evidence = write(
        dir.path(),
        "e.jsonl",
        "\n{\"tick\": 0, \"signals\": {\"a\": 1.0}}\n\n",
    );
    let out = dir.path().join("out");
    let (code, _, _) = modal(&[
        "run",
        config.to_str().unwrap(),
        evidence.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let trajectory = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert_eq!(trajectory, "tick,a,b,c\n0,1,0,0\n");
}

#[test]
fn run_without_a_layout_is_a_validation_failure() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"name": "t", "kind": "custom", "complex": [["a"]]}"#,
    );
    let evidence = write(dir.path(), "e.jsonl", "");
    let out = dir.path().join("out");
    let (code, _, stderr) = modal(&[
        "run",
        config.to_str().unwrap(),
        evidence.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(stderr.contains("layout"));
}

#[test]
fn trace_svg_draws_faces_vertices_and_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.json", TINY);
    let evidence = write(
        dir.path(),
        "e.jsonl",
        concat!(
            "{\"tick\": 0, \"signals\": {\"a\": 1.0}}\n",
            "{\"tick\": 1, \"signals\": {\"a\": 1.0, \"b\": 1.0, \"c\": 2.0}}\n",
        ),
    );
    let out = dir.path().join("out");
    let (code, _, _) = modal(&[
        "run",
        config.to_str().unwrap(),
        evidence.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let svg = std::fs::read_to_string(out.join("trace.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("<polygon"));
    assert!(svg.contains("<polyline"));
    assert!(svg.contains("<circle"));
    // the second sample blends a:1 b:1 c:2 over total 4, landing at
    // 0.25*(0,0) + 0.25*(100,0) + 0.5*(50,90)
    assert!(svg.contains("50.000,45.000"));
}
