use std::process::{Command, Output};

use serde_json::Value;

fn symlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symlab")).args(args).output().expect("runs")
}

fn json(args: &[&str]) -> Value {
    let out = symlab(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn build_prints_prefix() {
    let out = symlab(&["build", "periodic:011", "--length", "7"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "0110110");
    let out = symlab(&["build", "single:3", "--length", "6"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "000100");
}

#[test]
fn db_of_shifted_alternation() {
    let v = json(&["db", "periodic:01", "periodic:10", "--horizon", "4096"]);
    assert_eq!(v["cantor_db"], "1/1");
    assert_eq!(v["symbolic_density"]["limsup_est"], "1/1");
}

#[test]
fn report_is_byte_identical_across_runs() {
    let args = ["report", "--seed", "3", "--horizon", "8192"];
    let a = symlab(&args);
    let b = symlab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let rows: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 3);
    assert!(rows.as_array().unwrap().iter().all(|r| r["chain_consistent"] == true));
}

#[test]
fn csv_report_has_three_rows() {
    let out = symlab(&["report", "--format", "csv", "--horizon", "4096", "--seed", "1"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 4);
}

#[test]
fn classify_table_and_config_file() {
    let dir = std::env::temp_dir().join(format!("symlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("suite.json");
    let printed = symlab(&["report", "--print-config", "--seed", "4", "--horizon", "4096"]);
    std::fs::write(&config, &printed.stdout).unwrap();
    let out = symlab(&["classify", "--config", config.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("system"));
    assert_eq!(text.lines().count(), 4);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn independence_and_seqentropy() {
    let v = json(&["independence", "powers", "--max-k", "3"]);
    assert_eq!(v["outcome"], "found");
    assert_eq!(v["certificate"]["positions"].as_array().unwrap().len(), 3);
    let v = json(&["seqentropy", "full:2", "--contiguous", "8", "--horizon", "4096"]);
    assert!((v["estimate"]["rate"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let v = json(&["seqentropy", "full:2", "--builder", "1", "--steps", "4", "--horizon", "4096"]);
    assert_eq!(v["curve"]["steps"][3]["cells"], 16);
}

#[test]
fn regularity_of_toeplitz() {
    let v = json(&["regularity", "toeplitz", "--horizon", "65536"]);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["progressions"].as_array().unwrap().len(), 12);
}

#[test]
fn bad_input_exits_nonzero() {
    assert!(!symlab(&["db", "nonsense", "zero"]).status.success());
    assert!(!symlab(&["regularity", "sturmian:golden"]).status.success());
    assert!(!symlab(&["classify", "--config", "/nonexistent/suite.json"]).status.success());
}
