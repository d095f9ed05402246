use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ctxprob"))
}

fn model(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("models").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn diagnostic(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is a JSON diagnostic")
}

#[test]
fn analyze_reports_every_declared_context() {
    let path = model("kq_0.125.json");
    let out = run(&["analyze", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    let contexts = v["contexts"].as_array().unwrap();
    let c123 = contexts.iter().find(|c| c["name"] == "C123").unwrap();
    let lambda = c123["lambda"][0].as_f64().unwrap();
    assert!((lambda + 0.75f64.sqrt() / 2.0).abs() < 1e-12);
    assert_eq!(c123["class"], "trigonometric");
}

#[test]
fn analyze_single_context_and_unknown_context() {
    let path = model("kq_0.25.json");
    let p = path.to_str().unwrap();
    let out = run(&["analyze", p, "--context", "C24", "--format", "json"]);
    assert_eq!(json_stdout(&out)["contexts"].as_array().unwrap().len(), 1);

    let out = run(&["analyze", p, "--context", "C99"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(diagnostic(&out)["error"], "unknown_context");
}

#[test]
fn represent_with_conjugate_branch_and_anchor() {
    let path = model("kq_0.125.json");
    let out = run(&[
        "represent",
        path.to_str().unwrap(),
        "--branch",
        "conjugate",
        "--anchor",
        "C13",
        "--context",
        "C24",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_stdout(&out);
    assert_eq!(v["branch"], "conjugate");
    assert_eq!(v["anchor"], "C13");
    let e1 = &v["a_basis"]["vectors"][0];
    assert!((e1[0][0].as_f64().unwrap() - 0.5).abs() < 1e-12, "{e1}");
    let pa = v["contexts"][0]["a_probabilities"].as_array().unwrap();
    for p in pa {
        assert!((p.as_f64().unwrap() - 0.5).abs() < 1e-12);
    }
}

#[test]
fn verify_passes_and_respects_tolerance_override() {
    let path = model("kq_0.4.json");
    let p = path.to_str().unwrap();
    let out = run(&["verify", p, "--suite", "core"]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["verify", p, "--tolerance=-1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json_stdout(&out)["failed"].as_u64().unwrap() > 0);
}

#[test]
fn verify_rejects_unknown_suite() {
    let path = model("kq_0.4.json");
    let out = run(&["verify", path.to_str().unwrap(), "--suite", "everything"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corrupted_weights_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"points": [{"id": "x", "p": 0.5}, {"id": "y", "p": 0.4}],
            "variables": {"a": {"x": 1, "y": 2}, "b": {"x": 1, "y": 1}}}"#,
    )
    .unwrap();
    let out = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let d = diagnostic(&out);
    assert_eq!(d["error"], "validation");
    assert!(d["message"].as_str().unwrap().contains("0.9"));
}

#[test]
fn missing_file_and_bad_json_exit_two() {
    let out = run(&["analyze", "/nonexistent/model.json"]);
    assert_eq!(out.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(diagnostic(&out)["error"], "validation");
}

#[test]
fn example_kq_table() {
    let out = run(&["example", "kq", "--q", "0.125", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert_eq!(v["distinct_states"], 10);
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["pass"] == true));

    let out = run(&["example", "kq", "--q", "0.7"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(diagnostic(&out)["error"], "q_out_of_range");
}

#[test]
fn gen_random_is_reproducible_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = run(&[
            "gen",
            "random",
            "--seed",
            "42",
            "--points",
            "6",
            "--double-stochastic",
            "--incompatible",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let out = run(&["verify", a.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn gen_random_unsatisfiable_constraints() {
    let out = run(&[
        "gen",
        "random",
        "--seed",
        "1",
        "--points",
        "6",
        "--arity-a",
        "2",
        "--arity-b",
        "3",
        "--double-stochastic",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(diagnostic(&out)["error"], "constraint_unsatisfiable");
}

#[test]
fn gen_kq_matches_bundled_model() {
    let out = run(&["gen", "kq", "--q", "0.125"]);
    assert_eq!(out.status.code(), Some(0));
    let bundled = std::fs::read(model("kq_0.125.json")).unwrap();
    assert_eq!(out.stdout, bundled);
}

#[test]
fn text_output_is_default() {
    let path = model("three_valued.json");
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Omega"));
    assert!(serde_json::from_str::<Value>(&text).is_err());
}
