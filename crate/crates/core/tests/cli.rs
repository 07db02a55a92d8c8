//! End-to-end runs of the `virial` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn virial(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_virial")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = virial(args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn scan_is_byte_identical() {
    let args = ["scan", "--t-min", "1", "--t-max", "50", "--step", "0.1"];
    let (a, b) = (virial(&args), virial(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 492);
    assert_eq!(lines[0], "t_star,b2_integral,b2_series,db2_dt,b2_over_t,residual");
    // Below the series region the series column is empty.
    assert!(lines[1].starts_with("1,") && lines[1].split(',').nth(2) == Some(""));
}

#[test]
fn scan_json_has_the_csv_fields() {
    let v = json(&["--json", "scan", "--t-min", "2", "--t-max", "3", "--step", "0.5"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let keys: Vec<&str> = rows[0].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["t_star", "b2_integral", "b2_series", "db2_dt", "b2_over_t", "residual"]);
}

#[test]
fn fixpoint_and_boyle() {
    let fp = json(&["--json", "fixpoint"]);
    assert!((fp["t_star"].as_f64().unwrap() - 6.4307984722).abs() < 1e-9);
    assert!((fp["b2"].as_f64().unwrap() - 0.348274831901).abs() < 1e-11);
    let csv = stdout(&virial(&["fixpoint"]));
    assert!(csv.contains("t_star,6.4307984722\n"), "{csv}");
    let b = json(&["--json", "boyle"]);
    assert!((b["t_star"].as_f64().unwrap() - 3.41792802305).abs() < 1e-9);
}

#[test]
fn scaling_report() {
    let v = json(&["--json", "scaling"]);
    assert_eq!(v["b2_star"], "3/8");
    assert_eq!(v["fixed_points"], serde_json::json!(["0", "1", "inf"]));
    assert_eq!(v["multipliers"][1], "8/3");
}

#[test]
fn clusters_inversion() {
    let v = json(&["--json", "clusters", "1", "-1/2", "1/3"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows[1]["virial"], "1/2");
    // 4·(1/4) − 2·(1/3) = 1/3.
    assert_eq!(rows[2]["virial"], "1/3");
}

#[test]
fn b3_hs_is_reproducible() {
    let a = virial(&["b3-hs", "--samples", "100000", "--seed", "9"]);
    let b = virial(&["b3-hs", "--samples", "100000", "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("seed,9"));
}

#[test]
fn verify_passes() {
    let o = virial(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 10);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",pass")), "{text}");
}

#[test]
fn verify_detects_a_corrupted_coefficient() {
    let o = virial(&["verify", "--fault-alpha1", "-2.0"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let row = text.lines().find(|l| l.starts_with("three_route_agreement,")).unwrap();
    assert!(row.ends_with(",fail"), "{row}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("three_route_agreement"));
}

#[test]
fn verify_with_few_samples_keeps_the_three_sigma_rule() {
    let v = json(&["--json", "verify", "--samples", "1000"]);
    let rows = v["rows"].as_array().unwrap();
    let mc = rows.iter().find(|r| r["check"] == "hard_sphere_b3").unwrap();
    let tol = mc["tolerance"].as_str().unwrap();
    assert!(tol.contains("3"), "{tol}");
    assert!(!tol.contains("0.005"), "{tol}");
}

#[test]
fn exit_codes() {
    assert_eq!(virial(&["scan", "--bogus"]).status.code(), Some(2));
    assert_eq!(virial(&[]).status.code(), Some(2));
    assert_eq!(virial(&["clusters", "1", "x/y"]).status.code(), Some(2));
    // b1 must be 1: a domain error, not misuse.
    assert_eq!(virial(&["clusters", "2", "1/2"]).status.code(), Some(1));
    assert_eq!(virial(&["scan", "--t-min", "-1"]).status.code(), Some(1));
    assert_eq!(virial(&["fixpoint", "--t-min", "8", "--t-max", "12"]).status.code(), Some(1));
    assert_eq!(virial(&["b3-hs", "--samples", "10"]).status.code(), Some(1));
    assert_eq!(virial(&["--help"]).status.code(), Some(0));
}
