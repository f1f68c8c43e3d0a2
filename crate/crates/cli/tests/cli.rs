//! End-to-end tests of the binary: exit codes, JSON output, determinism.

use std::process::{Command, Output};

fn quasimap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasimap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn validate_builtin_p2() {
    let out = quasimap(&["validate", "--geometry", "p2-line"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(v["picard_rank"], 1);
    assert_eq!(v["status"], "PASS");
}

#[test]
fn verify_quintic_prints_correction_coefficients() {
    let out = quasimap(&["verify", "--geometry", "quintic", "--cap", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for needle in ["120", "113400", "168168000", "PASS"] {
        assert!(text.contains(needle), "missing {needle} in:\n{text}");
    }
}

#[test]
fn full_verify_suite_passes() {
    let out = quasimap(&["verify"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for id in 1..=8 {
        assert!(text.contains(&format!("criterion {id}")), "{text}");
    }
    assert!(text.trim_end().ends_with("PASS"));
}

#[test]
fn unknown_geometry_is_exit_code_two() {
    let out = quasimap(&["validate", "--geometry", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_fano_config_is_exit_code_three() {
    // The third Hirzebruch surface: a valid fan whose anticanonical class is
    // not ample, so the S-function pipeline must refuse it.
    let dir = std::env::temp_dir().join("quasimap-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("f3.json");
    std::fs::write(
        &path,
        r#"{
            "rays": [[1,0],[0,1],[-1,3],[0,-1]],
            "max_cones": [[0,1],[1,2],[2,3],[3,0]],
            "Y": [4,1,0,0],
            "ample": [4,1,0,0],
            "flags": {"very_ample_y": false, "contains_all_curve_classes": false},
            "cap": 2
        }"#,
    )
    .unwrap();
    let out = quasimap(&["invariants", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_file_round_trip() {
    let dir = std::env::temp_dir().join("quasimap-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("p2.json");
    std::fs::write(
        &path,
        r#"{
            "rays": [[1,0],[0,1],[-1,-1]],
            "max_cones": [[0,1],[1,2],[2,0]],
            "Y": [1,0,0],
            "ample": [1,0,0],
            "flags": {"very_ample_y": true, "contains_all_curve_classes": true},
            "cap": 2
        }"#,
    )
    .unwrap();
    let out = quasimap(&["lefschetz", "--config", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(v["cap"], 2);
    assert_eq!(v["p0"]["0,0,0"], "1");
}

#[test]
fn relative_command_reports_point_invariant() {
    let out = quasimap(&["relative", "--geometry", "quintic", "--beta", "1,1,1,1,1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(v["relative_point_invariant"], "24");
    assert_eq!(v["y_degree"], 5);
    assert_eq!(v["ladder"].as_array().unwrap().len(), 6);
}

#[test]
fn wallcross_command_passes_on_quartic() {
    let out = quasimap(&["wallcross", "--geometry", "p3-quartic", "--cap", "2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(v["status"], "PASS");
    assert_eq!(v["classes"].as_array().unwrap().len(), 2);
}

#[test]
fn expand_command_matches_ladder_value() {
    let out = quasimap(&[
        "expand",
        "--geometry",
        "quintic",
        "--alpha",
        "5,0",
        "--insertions",
        "eta1,1",
        "--beta",
        "1,1,1,1,1",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(v["evaluation"]["value"], "24");
    assert_eq!(v["strictly_decreasing"], true);
}

#[test]
fn output_is_byte_deterministic() {
    let args = ["lefschetz", "--geometry", "p3-quartic", "--cap", "2"];
    let first = quasimap(&args);
    let second = quasimap(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}
