use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    root.join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apfourier"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn temp_config(name: &str, body: &str) -> String {
    let path = std::env::temp_dir().join(format!("apfourier-{}-{name}.cfg", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn quad_fast_is_zero_on_sidon_set() {
    let v = json(&["quad", "--freq", &fixture("sidon10.seq"), "--method", "fast"]);
    assert_eq!(v["M"], 0.0);
    assert_eq!(v["n"], 10);
}

#[test]
fn quad_methods_agree_on_non_sidon_set() {
    let fast = json(&["quad", "--freq", &fixture("triple.seq")]);
    let naive = json(&["quad", "--freq", &fixture("triple.seq"), "--method", "naive"]);
    let (f, n) = (fast["M"].as_f64().unwrap(), naive["M"].as_f64().unwrap());
    assert!((f - n).abs() <= 1e-12 * n.abs().max(1.0));
    assert!(f >= 2.0);
}

#[test]
fn mian_chowla_prefix_is_sidon() {
    let v = json(&["sidon", "--freq", &fixture("mianchowla10.seq")]);
    assert_eq!(v, serde_json::json!({ "is_sidon": true }));
}

#[test]
fn sidon_reports_witness() {
    let v = json(&["sidon", "--freq", &fixture("triple.seq")]);
    assert_eq!(v["is_sidon"], false);
    assert_eq!(v["witness"]["sum"], 4);
}

#[test]
fn reduce_merges_equal_floors() {
    let v = json(&["reduce", "--series", &fixture("reduce4.seq"), "--format", "json"]);
    assert_eq!(v["v"], serde_json::json!([2, 4, 9]));
    assert_eq!(v["b"][0], serde_json::json!([1.0, 2.0]));
}

#[test]
fn reduce_text_output_reloads() {
    let out = run(&["reduce", "--series", &fixture("reduce4.seq")]);
    assert!(out.status.success());
    let path = std::env::temp_dir().join(format!("apfourier-{}-reduced.seq", std::process::id()));
    std::fs::write(&path, &out.stdout).unwrap();
    let v = json(&["eval", "--series", &path.display().to_string(), "--t", "0"]);
    assert_eq!(v["points"][0]["re"], 3.0);
    assert_eq!(v["points"][0]["im"], 3.0);
}

#[test]
fn interp_pair_without_series() {
    let v = json(&["check", "interp", "--p", "1.3333333", "--q", "1.3333333"]);
    assert_eq!(v["interp_valid"], true);
    let v = json(&["check", "interp", "--p", "2", "--q", "2"]);
    assert_eq!(v["interp_valid"], false);
}

#[test]
fn unknown_flag_is_usage_error() {
    assert_eq!(run(&["--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["quad"]).status.code(), Some(2));
}

#[test]
fn unknown_config_key_is_usage_error() {
    let cfg = temp_config("unknown", "seed = 1\nnot_a_key = 3\n");
    let out = run(&["sidon", "--freq", &fixture("triple.seq"), "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not_a_key"));
}

#[test]
fn flags_override_config_which_overrides_defaults() {
    let cfg = temp_config("precedence", "trials = 3\nn = 8\nt1 = 2\n");
    let from_config = json(&["experiment", "halasz", "--config", &cfg]);
    assert_eq!(from_config["trials"], 3);
    assert_eq!(from_config["n_values"], serde_json::json!([8]));
    let from_flag = json(&["experiment", "halasz", "--config", &cfg, "--trials", "2"]);
    assert_eq!(from_flag["trials"], 2);
    let defaults = json(&["experiment", "halasz", "--n", "4", "--t1", "0"]);
    assert_eq!(defaults["trials"], 64);
    assert_eq!(defaults["seed"], 42);
}

#[test]
fn invalid_series_is_domain_error() {
    let out = run(&["check", "all", "--series", &fixture("bad_decreasing.seq")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn output_does_not_depend_on_workers() {
    let base = ["experiment", "halasz", "--n", "16,32", "--trials", "5", "--t1", "20", "--seed", "9"];
    let one = run(&[&base[..], &["--workers", "1"]].concat());
    let two = run(&[&base[..], &["--workers", "2"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn zero_workers_rejected() {
    let out = run(&["sidon", "--freq", &fixture("triple.seq"), "--workers", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_tables() {
    let out = run(&["maximal", "--series", &fixture("triple.seq"), "--t1", "0.02", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,re,im,maxabs");
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[1], "0,3,0,3");

    let out = run(&["sidon", "--freq", &fixture("sidon10.seq"), "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "is_sidon\ntrue\n");
}

#[test]
fn out_file_written() {
    let path = std::env::temp_dir().join(format!("apfourier-{}-out.json", std::process::id()));
    let p = path.display().to_string();
    let out = run(&["tau", "--x", "0.5", "--out", &p]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-3);
}

#[test]
fn dilated_eval_reports_tail_bound() {
    let v = json(&["eval", "--series", &fixture("dilated.seq"), "--dilated", "--t", "1"]);
    assert!(v["points"][0]["tail_bound"].is_number());
}
