use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const TP2_INPUT: &str =
    r#""input": {"d": 2, "u": [[1,0],[0,1],[-1,-1]], "lambdaR": [0,0,1], "tropical": [0,0,5]}"#;

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("job.json");
    fs::write(&path, body).unwrap();
    path
}

fn hypmirror(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypmirror"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn mirror_equations_on_projective_plane() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{{{TP2_INPUT}}}"));
    let out = hypmirror(&["mirror", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(
        v["mirror"]["equations"],
        serde_json::json!([
            "u1*v1 = (1+Z1)*(1+q3*Z1^-1*Z2^-1)",
            "u2*v2 = (1+Z2)*(1+q3*Z1^-1*Z2^-1)"
        ])
    );
}

#[test]
fn mutated_atlas_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(r#"{{{TP2_INPUT}, "faults": {{"flipDelta": [0]}}}}"#),
    );
    let out = hypmirror(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["verify"]["passed"], Value::Bool(false));
    let failed: Vec<&str> = v["verify"]["failed_checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    assert!(failed.contains(&"descent"), "{failed:?}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("verify: descent"));
}

#[test]
fn intact_atlas_passes_verification() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{{{TP2_INPUT}}}"));
    let out = hypmirror(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["verify"]["passed"], Value::Bool(true));
}

#[test]
fn perturbed_phi_sign_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(r#"{{{TP2_INPUT}, "faults": {{"phiSign": [2]}}}}"#),
    );
    let out = hypmirror(&["multiplicative", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn empty_task_list_gives_empty_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!(r#"{{{TP2_INPUT}, "tasks": []}}"#));
    let out = hypmirror(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out), serde_json::json!({}));
}

#[test]
fn schema_violation_exits_with_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"input": {"d": 2, "lambdaR": [0], "tropical": [0]}}"#,
    );
    let out = hypmirror(&["check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/input/u"));
}

#[test]
fn non_simple_input_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"input": {"d": 2, "u": [[1,0],[0,1],[-1,-1]], "lambdaR": [0,0,1], "tropical": [0,0,0]}}"#,
    );
    let out = hypmirror(&["chambers", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let tasks = r#""tasks": ["check","circuits","chambers","strata","mirror","atlas","verify","multiplicative","periods"]"#;
    let cfg = write_config(dir.path(), &format!("{{{TP2_INPUT}, {tasks}}}"));
    let a = hypmirror(&["run", "--config", cfg.to_str().unwrap()]);
    let b = hypmirror(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = hypmirror(&["run", "--config", cfg.to_str().unwrap(), "--format", "text"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("verify.passed = true"));
}

#[test]
fn figures_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(r#"{{{TP2_INPUT}, "tasks": ["chambers"]}}"#),
    );
    let out_dir = dir.path().join("out");
    let out = hypmirror(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--svg",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let chambers: Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("chambers.json")).unwrap()).unwrap();
    let tropical = fs::read_to_string(out_dir.join("tropical.svg")).unwrap();
    let n_chambers = chambers["tropical"].as_array().unwrap().len();
    assert_eq!(
        tropical.matches("<text class=\"chamber\"").count(),
        n_chambers
    );
    assert_eq!(tropical.matches("<path class=\"hyperplane\"").count(), 3);
    let real = fs::read_to_string(out_dir.join("real.svg")).unwrap();
    assert_eq!(
        real.matches("<text class=\"chamber\"").count(),
        chambers["real"].as_array().unwrap().len()
    );
}

#[test]
fn figures_need_low_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"input": {"d": 3, "u": [[1,0,0],[0,1,0],[0,0,1],[-1,-1,-1]], "lambdaR": [0,0,0,1], "tropical": [0,0,0,5]}}"#,
    );
    let out_dir = dir.path().join("out");
    let out = hypmirror(&[
        "check",
        "--config",
        cfg.to_str().unwrap(),
        "--svg",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
