use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn percolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_percolab")).args(args).output().expect("the binary runs")
}

fn summary(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn quotient_build_reports_the_covering() {
    let out = percolab(&["quotient-build", "--graph", "hypercubic(2)", "--action", "translate(0,3)", "--r", "3"]);
    assert!(out.status.success());
    let s = summary(&out);
    assert_eq!(s["pass"], true);
    assert_eq!(s["result"]["degree_bound"], serde_json::json!([4, 4]));
    assert_eq!(s["result"]["ball_sizes"][0], 25);
    assert!(s["result"]["weak_covering"].as_str().unwrap().ends_with("result=pass"));
}

#[test]
fn verify_cover_accepts_built_in_pairs() {
    for pair in ["z-k2", "z-c4", "z2-cylinder3", "z3-slab2"] {
        let out = percolab(&["verify-cover", "--graph", pair, "--r", "3"]);
        assert!(out.status.success(), "{pair}: {}", String::from_utf8_lossy(&out.stdout));
    }
    let s = summary(&percolab(&["verify-cover", "--graph", "z-k2", "--r", "3"]));
    assert_eq!(s["result"]["checks"]["strong-covering"]["holds"], false);
    assert_eq!(s["result"]["checks"]["choose_r"]["detail"], "1");
}

#[test]
fn sweep_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("sweep");
    let args = ["sweep", "--graph", "hypercubic(2)", "--p", "0.4,0.6", "--s", "0,0.5", "--L", "2,4", "--samples", "2000", "--seed", "3"];
    let mut with_out = args.to_vec();
    with_out.extend(["--workers", "1", "--out", out_dir.to_str().unwrap()]);
    let out = percolab(&with_out);
    assert!(out.status.success());
    let csv = read(&out_dir, "results.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("p,s,L,theta,stderr,n,seed"));
    assert_eq!(lines.count(), 8);
    let json: Value = serde_json::from_str(&read(&out_dir, "summary.json")).unwrap();
    assert_eq!(json["pass"], true);
    assert_eq!(json["result"]["points"], 8);
    let other = dir.path().join("three");
    let mut three = args.to_vec();
    three.extend(["--workers", "3", "--out", other.to_str().unwrap()]);
    assert!(percolab(&three).status.success());
    assert_eq!(csv, read(&other, "results.csv"));
}

#[test]
fn oracle_check_agrees_on_a_cycle() {
    let out = percolab(&["oracle-check", "--graph", "cycle(5)", "--p", "0.5,0.8", "--s", "0,1", "--L", "2", "--samples", "20000"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let s = summary(&out);
    assert_eq!(s["result"]["cases"].as_array().unwrap().len(), 4);
    let first = &s["result"]["cases"][0];
    assert_eq!(first["exact"], 0.4375);
}

#[test]
fn oracle_check_needs_a_finite_graph() {
    let out = percolab(&["oracle-check", "--graph", "hypercubic(2)", "--p", "0.5", "--L", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a finite graph"));
}

#[test]
fn couple_verify_passes_on_the_two_point_quotient() {
    let out = percolab(&["couple-verify", "--graph", "z-k2", "--p", "0.95", "--epsilon", "0.9", "--L", "4", "--samples", "3000"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let s = summary(&out);
    assert_eq!(s["result"]["inclusion_pass"], 3000);
    assert_eq!(s["result"]["audit_pass"], 3000);
    assert_eq!(s["result"]["m"], 2);
}

#[test]
fn couple_verify_rejects_an_inadmissible_s() {
    let out = percolab(&["couple-verify", "--graph", "z-k2", "--p", "0.95", "--epsilon", "0.9", "--s", "0.5", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn surgery_test_finds_no_failures() {
    for event in ["arm", "connect"] {
        let out = percolab(&["surgery-test", "--graph", "hypercubic(2)", "--event", event, "--samples", "200"]);
        assert!(out.status.success(), "{event}");
        assert_eq!(summary(&out)["result"]["instances"], 200);
    }
}

#[test]
fn pc_estimate_brackets_the_tree_threshold() {
    let out = percolab(&["pc-estimate", "--graph", "tree(3)", "--L", "8", "--samples", "10000", "--tol", "0.02"]);
    let s = summary(&out);
    let lo = s["result"]["interval"][0].as_f64().unwrap();
    let hi = s["result"]["interval"][1].as_f64().unwrap();
    assert!(lo < 0.53 && hi > 0.49 && hi - lo <= 0.1, "[{lo}, {hi}]");
}

#[test]
fn gap_refuses_a_quotient_that_is_not_quasi_transitive() {
    let out = percolab(&["gap", "--graph", "tree3-fold", "--samples", "100"]);
    assert_eq!(out.status.code(), Some(1));
    let s = summary(&out);
    assert!(s["result"]["refused"][0].as_str().unwrap().contains("H is not quasi-transitive"));
}

#[test]
fn unknown_descriptors_are_errors() {
    assert_eq!(percolab(&["sweep", "--graph", "bogus", "--p", "0.5", "--L", "2"]).status.code(), Some(2));
    assert_eq!(percolab(&["verify-cover", "--graph", "no-such-pair"]).status.code(), Some(2));
    assert_eq!(percolab(&["surgery-test", "--graph", "hypercubic(1)", "--event", "both"]).status.code(), Some(2));
}
