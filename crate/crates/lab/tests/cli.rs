use std::path::Path;
use std::process::{Command, Output};

use lcl_core::lr::build_extremal_lr_profile;
use lcl_core::rational::ratio;
use lcl_core::{Field, RecoveryParams};
use lcl_lab::format::{parse_matrix, write_profile, CodeSidecar};
use serde_json::Value;

fn lcl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcl")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn threshold_of_the_extremal_profile() {
    let dir = tempfile::tempdir().unwrap();
    let f2 = Field::of_order(2).unwrap();
    let v = build_extremal_lr_profile(&f2, 6, &RecoveryParams::new(ratio(1, 2), 1, 3, false).unwrap()).unwrap();
    let path = write(dir.path(), "v.txt", &write_profile(&v));
    let o = lcl(&["threshold", "--profile", &path]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("threshold 1/3\nU "), "{text}");
    assert!(text.contains("\nW "));
}

#[test]
fn threshold_of_a_hand_written_profile() {
    let dir = tempfile::tempdir().unwrap();
    // half full F_3^2, half the diagonal
    let path = write(dir.path(), "v.txt", "4 2 3\n2 2\n1 0\n0 1\n2 1\n1 1\n");
    let o = lcl(&["threshold", "--profile", &path]);
    assert!(stdout(&o).starts_with("threshold 1/2\n"), "{}", stdout(&o));
}

#[test]
fn certify_code_reports_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    // {000, 111, 100, 011}: 000, 100 and 111 are within distance 2 of 100
    let g = write(dir.path(), "g.txt", "2 3 2\n1 1 1\n1 0 0\n");
    let o = lcl(&["certify-code", "--generator", &g, "--rho", "2/3", "--L", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let (verdict, json) = text.split_once('\n').unwrap();
    assert_eq!(verdict, "not recoverable");
    let v: Value = serde_json::from_str(json.trim()).unwrap();
    assert_eq!(v["witness"]["matrix"].as_array().unwrap().len(), 3);
    assert_eq!(v["witness"]["matrix"][0].as_array().unwrap().len(), 3);
    assert_eq!(v["witness"]["center"].as_array().unwrap().len(), 3);

    let o = lcl(&["certify-code", "--generator", &g, "--rho", "0", "--L", "1", "--strategy", "balls"]);
    let text = stdout(&o);
    assert!(text.starts_with("recoverable\n"));
    let v: Value = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
    assert!(v["witness"].is_null());
}

#[test]
fn cap_violations_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", "3 4 2\n1 0 0 0\n0 1 0 0\n0 0 1 0\n");
    let o = lcl(&["certify-code", "--generator", &g, "--rho", "1/4", "--L", "2", "--strategy", "subsets", "--cap", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"));

    let o = lcl(&[
        "simulate-rlc", "--n", "4", "--q", "2", "--rates", "1/4,3/4", "--rho", "1/4", "--L", "2", "--decide", "subsets",
        "--cap", "3", "--trials", "5",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("at rate"));
}

#[test]
fn bad_input_exits_with_1() {
    let o = lcl(&["threshold", "--profile", "/nonexistent/profile.txt"]);
    assert_eq!(o.status.code(), Some(1));
    let o = lcl(&["simulate-rlc", "--n", "4", "--q", "2", "--rates", "1/3", "--rho", "1/4", "--L", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn simulate_formats() {
    let args = ["simulate-rs", "--n", "5", "--q", "5", "--rates", "0,2/5", "--rho", "1/5", "--L", "1", "--trials", "12"];
    let csv = stdout(&lcl(&args));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "rate,k,satisfied,trials,estimate,wilson_low,wilson_high,threshold,side");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0/1,0,0,12,0.000000,0.000000,"));
    let json: Value = serde_json::from_str(&stdout(&lcl(&[&args[..], &["--format", "json"]].concat()))).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 2);
    assert_eq!(json["ensemble"], "rs");
}

#[test]
fn profile_property_runs() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "v.txt", "4 2 3\n2 2\n1 0\n0 1\n2 1\n1 1\n");
    let o = lcl(&["simulate-rlc", "--n", "4", "--q", "3", "--rates", "1/4,3/4", "--profile", &path, "--trials", "10"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().nth(2).unwrap().ends_with(",1/2,above"));
}

#[test]
fn verify_lemmas_prints_pass_lines() {
    let o = lcl(&["verify-lemmas", "--select", "submodularity", "--samples", "50"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("PASS submodularity"));
    assert_eq!(lcl(&["verify-lemmas", "--select", "bogus"]).status.code(), Some(1));
}

#[test]
fn trace_export_is_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "v.txt", "4 2 7\n2 2\n1 0\n0 1\n2 1\n1 1\n");
    let out = dir.path().join("t.jsonl");
    let o = lcl(&["trace", "--profile", &path, "--k", "2", "--seed", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let recs: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 5);
    assert_eq!(recs[0]["dim"], 4);
    for r in &recs {
        assert!(r["gamma"]["full"].is_i64() && r["gamma"]["w1"].is_i64());
    }
}

#[test]
fn sample_code_writes_matrix_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("code");
    let o = lcl(&["sample-code", "--ensemble", "rs", "--n", "6", "--k", "3", "--q", "7", "--seed", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let g = parse_matrix(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!((g.rows(), g.cols()), (3, 6));
    let side: CodeSidecar = serde_json::from_str(&std::fs::read_to_string(dir.path().join("code.json")).unwrap()).unwrap();
    assert_eq!(side.model, "rs");
    assert_eq!(side.seed, Some(5));
    assert_eq!(side.points.as_ref().unwrap().len(), 6);
    // same seed, same code
    let again = lcl(&["sample-code", "--ensemble", "rs", "--n", "6", "--k", "3", "--q", "7", "--seed", "5"]);
    assert!(stdout(&again).starts_with(&std::fs::read_to_string(&out).unwrap()));
}
