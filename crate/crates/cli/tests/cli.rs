//! End-to-end runs of the `qnahm` binary: exit codes, JSON reports against
//! the checked-in schemas, config overrides and the catalog override.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qnahm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnahm")).args(args).env_remove("QNAHM_CATALOG").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn repo_file(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn assert_valid(schema: &str, v: &Value) {
    let text = std::fs::read_to_string(repo_file(&format!("schemas/{schema}"))).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).unwrap_or_else(|e| panic!("{e}"));
    let msgs: Vec<String> = match compiled.validate(v) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    assert!(msgs.is_empty(), "{msgs:?}");
}

/// A scratch file unique to this test process.
fn scratch(name: &str, contents: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("qnahm-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn verify_single_identity_passes() {
    let o = qnahm(&["verify", "--id", "EX11.1", "--order", "60"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("PASS  EX11.1"));
}

#[test]
fn verify_all_json_has_no_failures_and_matches_schema() {
    let o = qnahm(&["verify", "--all", "--order", "50", "--jobs", "8", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_valid("verify-report.schema.json", &v);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["errors"], 0);
    let ids: Vec<&str> = v["reports"].as_array().unwrap().iter().map(|r| r["id"].as_str().unwrap()).collect();
    let manifest: Vec<&str> = qnahm::catalog::MANIFEST.lines().collect();
    assert_eq!(ids, manifest, "reports come back in catalog order");
}

#[test]
fn anchors_resolve_like_ids() {
    let o = qnahm(&["verify", "--id", "table3.11.1", "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["reports"][0]["id"], "EX11.1");
}

#[test]
fn unknown_inputs_exit_2() {
    assert_eq!(code(&qnahm(&["verify", "--id", "NO.SUCH"])), 2);
    assert_eq!(code(&qnahm(&["verify", "--filter", "ZZZ"])), 2);
    assert_eq!(code(&qnahm(&["verify", "--id", "EX1.1", "--order", "0"])), 2);
    assert_eq!(code(&qnahm(&["verify", "--id", "EX1.1", "--all"])), 2);
    assert_eq!(code(&qnahm(&["bailey", "--verify", "NOPE"])), 2);
    assert_eq!(code(&qnahm(&["bailey", "--chain", "C1>no_such_transform"])), 2);
    assert_eq!(code(&qnahm(&["modular", "--tau", "1-i"])), 2);
    let o = qnahm(&["expand", "--expr", "P(q;q)_-1", "--order", "5"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("byte"));
}

#[test]
fn bound_certificate_failure_exits_3() {
    let o = qnahm(&["expand", "--expr", "nahm{A=[[1/1000000000000000]];b=[0];c=0;d=[1]}", "--order", "10"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn wrong_identity_exits_1_with_first_difference() {
    let catalog = r#"[
      {"id": "bad", "anchors": ["x"], "arity": "q", "lhs": "J(1)", "rhs": "J(1) + 2*q^(7/2)"},
      {"id": "good", "anchors": ["y"], "arity": "q", "lhs": "J(1)", "rhs": "P(q;q)_inf"}
    ]"#;
    let path = scratch("catalog.json", catalog);
    let o = Command::new(env!("CARGO_BIN_EXE_qnahm"))
        .args(["verify", "--all", "--format", "json"])
        .env("QNAHM_CATALOG", &path)
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_valid("verify-report.schema.json", &v);
    assert_eq!(v["failed"], 1);
    assert_eq!(v["reports"][0]["discrepancy"]["exponent"], "7/2");
    assert_eq!(v["reports"][1]["status"], "pass");
}

#[test]
fn config_overrides_default_order_and_flags_win() {
    let cfg = scratch("config.json", r#"{"orders": {"EX11.1": "25"}, "x_orders": {"T1.3.1": 5}}"#);
    let cfg = cfg.to_str().unwrap();
    let v = json(&qnahm(&["verify", "--id", "EX11.1", "--id", "T1.3.1", "--config", cfg, "--format", "json"]));
    assert_eq!(v["reports"][0]["order"], "25");
    assert_eq!(v["reports"][1]["x_order"], 5);
    let v = json(&qnahm(&["verify", "--id", "EX11.1", "--config", cfg, "--order", "31", "--format", "json"]));
    assert_eq!(v["reports"][0]["order"], "31");
    let bad = scratch("bad-config.json", r#"{"orders": {"NO.SUCH": "25"}}"#);
    assert_eq!(code(&qnahm(&["verify", "--id", "EX11.1", "--config", bad.to_str().unwrap()])), 2);
}

#[test]
fn fractional_order_is_accepted() {
    let v = json(&qnahm(&["verify", "--id", "EX1.1", "--order", "41/2", "--format", "json"]));
    assert_eq!(v["reports"][0]["order"], "41/2");
    assert_eq!(v["reports"][0]["status"], "pass");
}

#[test]
fn expand_prints_the_truncated_series() {
    let o = qnahm(&["expand", "--expr", "J(1)", "--order", "7"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "1 - q - q^2 + q^5 + q^7 + O(q^(8))");
    let v = json(&qnahm(&["expand", "--expr", "P(x;q)_inf", "--order", "3", "--x-order", "2", "--format", "json"]));
    assert_eq!(v["x_order"], 2);
    assert!(v["series"]["coefficients"].is_array());
}

#[test]
fn bailey_reports_match_schema() {
    let o = qnahm(&["bailey", "--verify", "L26", "--n-max", "8", "--order", "30", "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_valid("pair-report.schema.json", &json(&o));
    let o = qnahm(&["bailey", "--chain", "L23", "--n-max", "5", "--order", "30", "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_valid("chain-report.schema.json", &json(&o));
    let o = qnahm(&["bailey", "--chain", "G4s>raise_b0", "--n-max", "5", "--order", "30"]);
    assert_eq!(code(&o), 0);
    let v = json(&qnahm(&["bailey", "--list", "--format", "json"]));
    assert_eq!(v["pairs"].as_array().unwrap().len(), 20);
}

#[test]
fn modular_suite_passes_and_matches_schema() {
    let o = qnahm(&["modular", "--suite", "--tol", "1e-7", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_valid("modular-report.schema.json", &v);
    assert_eq!(v["failed"], 0);
    assert_eq!(code(&qnahm(&["modular", "--tau", "-1/3+3/2i", "--tol", "1e-8"])), 0);
    // An impossible tolerance fails rather than passing silently.
    assert_eq!(code(&qnahm(&["modular", "--tau", "i", "--tol", "1e-30"])), 1);
}

#[test]
fn dual_round_trips() {
    let q = scratch("quad.json", r#"{"A": [["4", "2"], ["2", "2"]], "b": ["0", "1"], "c": "1/30", "d": [1, 1]}"#);
    let o = qnahm(&["dual", "--quad", q.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["dual"]["A"], serde_json::json!([["1/2", "-1/2"], ["-1/2", "1"]]));
    let d = scratch("dual.json", &v["dual"].to_string());
    let back = json(&qnahm(&["dual", "--quad", d.to_str().unwrap(), "--format", "json"]));
    assert_eq!(back["dual"], v["quadruple"]);
    let indefinite = scratch("indef.json", r#"{"A": [["0", "1"], ["1", "0"]], "b": ["0", "0"], "c": "0", "d": [1, 1]}"#);
    assert_eq!(code(&qnahm(&["dual", "--quad", indefinite.to_str().unwrap()])), 2);
}

#[test]
fn builtin_catalog_matches_schema() {
    let text = std::fs::read_to_string(repo_file("crates/core/data/catalog.json")).unwrap();
    assert_valid("catalog.schema.json", &serde_json::from_str(&text).unwrap());
}
