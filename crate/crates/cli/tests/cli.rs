use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn largecolor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_largecolor")).args(args).output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let o = largecolor(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn trefoil_fk_text() {
    let o = largecolor(&["fk", "--braid", "1,1,1", "--strands", "2", "--x-order", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "q^8*x^(-13/2) + q^6*x^(-11/2) - q^3*x^(-7/2) - q^2*x^(-5/2) + q*x^(-1/2)"
    );
    assert!(lines.next().unwrap().contains("exact polynomial coefficients"));
}

#[test]
fn fk_json_carries_metadata_and_closure() {
    let v = json(&["fk", "--braid", "1,1,1", "--x-order", "3", "--expansion", "pos"]);
    assert_eq!(v["expansion"], "positive");
    assert_eq!(v["exactness"], "exact_polynomial_coeffs");
    assert_eq!(v["braid"]["closure"]["components"], 1);
    assert_eq!(v["series"]["x_window2"], serde_json::json!([null, 7]));
}

#[test]
fn parse_error_is_a_usage_error_with_json() {
    let o = largecolor(&["fk", "--braid", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "parse");
}

#[test]
fn domain_error_exits_one() {
    let o = largecolor(&["fk", "--braid", "1,1"]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "not-a-knot");
}

#[test]
fn unknown_flag_exits_two() {
    assert_eq!(largecolor(&["fk", "--bogus"]).status.code(), Some(2));
    assert_eq!(largecolor(&["verify", "nonsense"]).status.code(), Some(2));
}

#[test]
fn output_is_independent_of_worker_count() {
    let args = ["fk", "--braid=-2,-2,-2,-1,2,-1", "--x-order", "3", "--q-order", "12"];
    let one = Command::new(env!("CARGO_BIN_EXE_largecolor")).args(args).env("LARGECOLOR_WORKERS", "1").output().unwrap();
    let again = largecolor(&args);
    let three = largecolor(&[&["--workers", "3"], &args[..]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, again.stdout);
    assert_eq!(one.stdout, three.stdout);
}

#[test]
fn jones_and_alexander() {
    let j = largecolor(&["jones", "--braid", "1,1,1"]);
    assert_eq!(stdout(&j).trim(), "-q^(-4) + q^(-3) + q^(-1)");
    let a = largecolor(&["alexander", "--braid", "1,-2,1,-2"]);
    assert_eq!(stdout(&a).trim(), "-x^(-1) + 3 - x");
    let k = json(&["jones", "--braid", "1,1,1", "--color", "2", "--kashaev"]);
    assert!(k["kashaev"]["re"].as_f64().is_some());
}

#[test]
fn zhat_of_minus_one_surgery_on_m52() {
    let o = largecolor(&["zhat", "--braid", "-2,-2,-2,-1,2,-1", "--strands", "3", "--p", "-1", "--x-order", "6", "--q-order", "20"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("b = 0: q^(-1)*(1 - q - q^9 + q^14 - q^19 + O(q^"), "{text}");
}

#[test]
fn strange_series_for_the_trefoil() {
    let o = largecolor(&["strange", "--braid", "1,1,1", "--q-order", "8"]);
    assert!(stdout(&o).starts_with("-1/2*q + 5/2*q^2 + 7/2*q^3 - 11/2*q^6 - 13/2*q^8\n"), "{}", stdout(&o));
}

#[test]
fn oracles() {
    let lo = json(&["oracle", "lovejoy-osburn", "--kind", "mp", "--m", "2", "--p", "1", "--x-order", "1", "--q-order", "8"]);
    assert_eq!(lo["expansion"], "positive");
    let m = largecolor(&["oracle", "mseries", "--q-order", "8"]);
    assert!(stdout(&m).starts_with("f0 = -q^(-1) + 1 - q^2 + q^5\n"), "{}", stdout(&m));
    let t = largecolor(&["oracle", "tree", "--edges", "0-1,0-2", "--x-order", "1"]);
    assert!(t.status.success());
}

#[test]
fn annihilate_reports_both_conventions() {
    let op = scratch("identity-op.json");
    std::fs::write(&op, r#"{"coefficients":[{"terms":[{"q2":0,"x2":0,"num":"1","den":"1"}]}]}"#).unwrap();
    let o = largecolor(&["--format", "json", "annihilate", "--braid", "1,1,1", "--operator", op.to_str().unwrap(), "--x-order", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["residuals"].as_array().unwrap().len(), 2);
    assert_eq!(v["annihilating"], Value::Array(vec![]));
}

#[test]
fn link_series_through_partial_surgery() {
    let link = scratch("t42.json");
    let v = json(&["fk", "--braid", "1,1,1,1", "--coloring", "0,1", "--x-order", "5", "--q-order", "30"]);
    std::fs::write(&link, v.to_string()).unwrap();
    let p = json(&["partial-surgery", "--input", link.to_str().unwrap(), "--r", "1", "--lk", "2"]);
    assert_eq!(p["series"]["vars"], serde_json::json!(["y"]));
    assert!(!p["series"]["terms"].as_array().unwrap().is_empty());
}

#[test]
fn reverse_engineer_twist_family() {
    let o = largecolor(&["reverse-engineer", "--twist-p", "1", "--r", "3,4", "--x-order", "2", "--y-order", "1"]);
    let text = stdout(&o);
    assert!(text.contains("f_(1,0) = 1\n"), "{text}");
    assert!(text.contains("f_(1,1) = -q^(-1) + 1 + q\n"), "{text}");
}

#[test]
fn verify_reports_each_check() {
    let v = json(&["verify", "yang-baxter", "markov", "--random-braids", "4", "--max-weight", "2"]);
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"].as_array().unwrap().len(), 2);
}

#[test]
fn rmatrix_dump() {
    let o = largecolor(&["rmatrix", "dump", "--kind", "hw", "--a", "1", "--b", "0"]);
    assert_eq!(stdout(&o), "(1, 0) -> (0, 1): q*x^(-1)\n(1, 0) -> (1, 0): -q^(3/2)*x^(-3/2) + q^(1/2)*x^(-1/2)\n");
}

#[test]
fn batch_runs_every_line() {
    let jobs = scratch("jobs.txt");
    std::fs::write(&jobs, "# jobs\nalexander --braid 1,1,1\nfk --braid 0\n").unwrap();
    let o = largecolor(&["batch", jobs.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["ok"], true);
    assert_eq!(lines[1]["error"]["kind"], "parse");
}
