//! End-to-end runs of the binary: exit codes, JSON shape, determinism of
//! reports modulo the timing field, and file input/output plumbing.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::sync::Arc;

use tderiv::engine::OpMap;
use tderiv::nest::{NestAlgebra, NestSpec};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tderiv"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn strip_timing(mut v: serde_json::Value) -> serde_json::Value {
    v.as_object_mut().expect("top-level object").remove("timing_ms");
    v
}

#[test]
fn verify_json_runs_and_is_deterministic_modulo_timing() {
    let args = ["verify", "--nest", "1,2", "--trials", "10", "--seed", "5", "--json"];
    let first = stdout_json(&run(&args));
    let second = stdout_json(&run(&args));
    assert_eq!(first["round_trips"], serde_json::json!(10));
    assert_eq!(first["command"], serde_json::json!("verify"));
    assert!(first["timing_ms"].is_u64());
    let a = strip_timing(first);
    let b = strip_timing(second);
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap(),
        "reports must be byte-identical once timing is stripped"
    );
}

#[test]
fn verify_text_mode_mentions_the_tallies() {
    let out = run(&["verify", "--nest", "2", "--trials", "5", "--seed", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("round trips"), "got: {text}");
    assert!(text.contains("5 trials"), "got: {text}");
}

#[test]
fn corollaries_small_run_is_clean() {
    let out = run(&["corollaries", "--nest", "1,2", "--trials", "3", "--seed", "9", "--json"]);
    let v = stdout_json(&out);
    assert_eq!(v["all_clean"], serde_json::json!(true));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    for row in rows {
        assert_eq!(row["positives_ok"], row["positives"], "row {row}");
        assert_eq!(row["negatives_ok"], row["negatives"], "row {row}");
    }
}

#[test]
fn counterexample_is_green_and_deterministic() {
    let args = ["counterexample", "--json"];
    let first = stdout_json(&run(&args));
    let second = stdout_json(&run(&args));
    assert_eq!(first["ok"], serde_json::json!(true));
    assert_eq!(
        first["completion_system"]["forced_from_right"],
        serde_json::json!(["0", "0", "2", "0"])
    );
    assert_eq!(strip_timing(first), strip_timing(second));
}

fn write_pair(dir: &Path) -> (String, String) {
    let alg = Arc::new(NestAlgebra::new(NestSpec::new(vec![1, 2]).unwrap()));
    let e12 = alg.unit(1);
    let delta = OpMap::left_mul(&alg, &e12);
    let tau = OpMap::right_mul(&alg, &e12);
    let dpath = dir.join("delta.txt");
    let tpath = dir.join("tau.txt");
    fs::write(&dpath, delta.mat().to_text()).unwrap();
    fs::write(&tpath, tau.mat().to_text()).unwrap();
    (dpath.to_string_lossy().into_owned(), tpath.to_string_lossy().into_owned())
}

#[test]
fn solve_decides_both_orientations() {
    let dir = tempfile::tempdir().unwrap();
    let (delta, tau) = write_pair(dir.path());
    let v = stdout_json(&run(&[
        "solve", "--nest", "1,2", "--delta", &delta, "--tau", &tau, "--json",
    ]));
    assert_eq!(v["verdict"], serde_json::json!("holds"));
    assert!(v["triple"].is_object());
    assert!(v["gamma"].is_array());
    assert!(v["witness"].is_null());

    // Swapping the files crosses the orientation, which is refutable.
    let v = stdout_json(&run(&[
        "solve", "--nest", "1,2", "--delta", &tau, "--tau", &delta, "--json",
    ]));
    assert_eq!(v["verdict"], serde_json::json!("refuted"));
    assert!(v["triple"].is_null());
    assert!(v["gamma"].is_null());
    let w = &v["witness"];
    assert!(w["a"]["coords"].is_array());
    assert!(w["value"]["pretty"].is_string());
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "verify", "--nest", "1,2", "--trials", "4", "--seed", "2", "--json",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "with --out nothing goes to stdout");
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["round_trips"], serde_json::json!(4));
}

#[test]
fn bad_inputs_exit_with_code_two() {
    // Cut points must be strictly increasing.
    let out = run(&["verify", "--nest", "2,1", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("error:"), "stderr: {err}");

    // A campaign needs at least one trial.
    let out = run(&["verify", "--nest", "1,2", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["corollaries", "--nest", "1,2", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));

    // Unparsable matrix entry.
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "1 x 0\n0 1 0\n0 0 1\n").unwrap();
    let good = dir.path().join("good.txt");
    fs::write(&good, "0 0 0\n0 0 0\n0 0 0\n").unwrap();
    let out = run(&[
        "solve", "--nest", "1,2",
        "--delta", bad.to_str().unwrap(),
        "--tau", good.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Wrong matrix size for the algebra.
    let small = dir.path().join("small.txt");
    fs::write(&small, "0 0\n0 0\n").unwrap();
    let out = run(&[
        "solve", "--nest", "1,2",
        "--delta", small.to_str().unwrap(),
        "--tau", good.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Missing file.
    let out = run(&[
        "solve", "--nest", "1,2",
        "--delta", dir.path().join("absent.txt").to_str().unwrap(),
        "--tau", good.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
