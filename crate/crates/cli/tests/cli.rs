use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    p.to_str().unwrap().to_string()
}

fn simnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn posterior(o: &Output) -> Vec<f64> {
    assert_eq!(code(o), 0, "{}", stderr(o));
    json(o)["posterior"]["probabilities"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p.as_f64().unwrap())
        .collect()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn edit_json(path: &str, f: impl FnOnce(&mut Value)) -> String {
    let mut v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    f(&mut v);
    serde_json::to_string_pretty(&v).unwrap()
}

fn infer(model: &str, evidence: &str, mode: &str) -> Output {
    simnet(&["infer", model, "--evidence", evidence, "--mode", mode, "--json"])
}

#[test]
fn validate_accepts_the_fixtures() {
    for name in ["sb.json", "toy3.json", "toy3p.json"] {
        let o = simnet(&["validate", &fixture(name)]);
        assert_eq!(code(&o), 0, "{name}: {}", stdout(&o));
    }
    let o = simnet(&["validate", &fixture("sb.json"), "--json"]);
    assert_eq!(json(&o)["valid"], Value::Bool(true));
}

#[test]
fn validate_reports_a_disconnected_cover() {
    let dir = TempDir::new().unwrap();
    let text = edit_json(&fixture("sb.json"), |v| {
        v["cover"].as_array_mut().unwrap().remove(1);
        v["local_networks"].as_array_mut().unwrap().remove(1);
    });
    let path = write(&dir, "bad.json", &text);
    let o = simnet(&["validate", &path]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("not connected"), "{}", stdout(&o));
}

#[test]
fn validate_reports_an_unnormalized_row() {
    let dir = TempDir::new().unwrap();
    let text = edit_json(&fixture("sb.json"), |v| {
        v["local_networks"][2]["cpts"]["l"]["rows"]["worker"] = serde_json::json!([0.0, 0.9]);
    });
    let path = write(&dir, "bad.json", &text);
    let o = simnet(&["validate", &path]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("sums to 0.9"), "{}", stdout(&o));
}

#[test]
fn parse_errors_carry_a_position() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "broken.json", "{\n  \"variables\": [\n");
    let o = simnet(&["validate", &path]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn toy3_sinet_refuses_and_multinet_answers() {
    let (m, e) = (fixture("toy3.json"), fixture("toy3-evidence.json"));
    let o = simnet(&["infer", &m, "--evidence", &e, "--mode", "sinet"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("P is not strictly positive"));
    let multinet = posterior(&infer(&m, &e, "multinet"));
    assert!(close(&multinet, &[2.0 / 3.0, 0.0, 1.0 / 3.0], 1e-12), "{multinet:?}");
    let global = posterior(&infer(&m, &e, "global"));
    assert!(close(&multinet, &global, 1e-9));
}

#[test]
fn sb_modes_agree_where_defined() {
    let (m, e) = (fixture("sb.json"), fixture("sb-evidence.json"));
    let multinet = posterior(&infer(&m, &e, "multinet"));
    let global = posterior(&infer(&m, &e, "global"));
    assert!(close(&multinet, &global, 1e-9));
    // 0.05 / 0.635, 0, 0.6 * 0.78 / 0.635, 0.15 * 0.78 / 0.635
    let expected = [0.05 / 0.635, 0.0, 0.468 / 0.635, 0.117 / 0.635];
    assert!(close(&multinet, &expected, 1e-12), "{multinet:?}");
    // no visitor wears a badge, so a local posterior is zero
    assert_eq!(code(&infer(&m, &e, "sinet")), 2);
}

#[test]
fn strictly_positive_fixtures_agree_in_all_modes() {
    let dir = TempDir::new().unwrap();
    let evidences = [
        ("toy3p.json", write(&dir, "e1.json", r#"{"y": "+y"}"#)),
        ("toy3p.json", write(&dir, "e2.json", "{}")),
        ("sb.json", write(&dir, "e3.json", "{}")),
    ];
    for (model, ev) in &evidences {
        let m = fixture(model);
        let a = posterior(&infer(&m, ev, "sinet"));
        let b = posterior(&infer(&m, ev, "multinet"));
        let c = posterior(&infer(&m, ev, "global"));
        assert!(close(&a, &b, 1e-9) && close(&b, &c, 1e-9), "{model}: {a:?} {b:?} {c:?}");
    }
}

#[test]
fn impossible_evidence_exits_3() {
    let dir = TempDir::new().unwrap();
    // every y=a cell is missing, hence zero; y still discriminates via b and c
    let joint = r#"{
      "variables": [{"name": "h", "values": ["h1", "h2", "h3"]}, {"name": "y", "values": ["a", "b", "c"]}],
      "cells": [
        {"assignment": {"h": "h1", "y": "b"}, "probability": 0.2},
        {"assignment": {"h": "h1", "y": "c"}, "probability": 0.05},
        {"assignment": {"h": "h2", "y": "b"}, "probability": 0.1},
        {"assignment": {"h": "h2", "y": "c"}, "probability": 0.15},
        {"assignment": {"h": "h3", "y": "b"}, "probability": 0.4},
        {"assignment": {"h": "h3", "y": "c"}, "probability": 0.1}
      ]
    }"#;
    let joint = write(&dir, "joint.json", joint);
    let model = dir.path().join("model.json");
    let o = simnet(&[
        "build", &joint, "--hypothesis", "h", "--cover", "h1,h2;h2,h3", "-o", model.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let ev = write(&dir, "e.json", r#"{"y": "a"}"#);
    let model = model.to_str().unwrap();
    assert_eq!(code(&infer(model, &ev, "multinet")), 3);
    assert_eq!(code(&infer(model, &ev, "global")), 3);
    assert_eq!(code(&infer(model, &ev, "sinet")), 2);
}

#[test]
fn unknown_evidence_values_are_validation_errors() {
    let dir = TempDir::new().unwrap();
    let ev = write(&dir, "e.json", r#"{"b": "maybe"}"#);
    let o = infer(&fixture("sb.json"), &ev, "multinet");
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("maybe"));
}

#[test]
fn convert_matches_the_fixture_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let o = simnet(&["convert", &fixture("sb.json"), "--order", "h,g,b,l", "-o", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let (x, y) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(x, y);
    assert_eq!(x, fs::read(fixture("sb-multinet.json")).unwrap());
}

#[test]
fn sb_multinet_copies_the_executive_rows() {
    let o = simnet(&["convert", &fixture("sb.json"), "--order", "h,g,b,l"]);
    let v = json(&o);
    let e = &v["networks"]["executive"]["cpts"];
    assert_eq!(e["l"]["rows"][""][0].as_f64(), Some(0.6));
    assert_eq!(e["b"]["parents"], serde_json::json!(["g"]));
    assert_eq!(v["networks"]["worker"]["cpts"]["l"]["rows"][""][0].as_f64(), Some(0.0));
    assert_eq!(v["networks"]["spy"]["cpts"]["b"]["rows"][""][0].as_f64(), Some(1.0));
}

#[test]
fn converted_multinet_reloads_with_the_same_posteriors() {
    let dir = TempDir::new().unwrap();
    let mn = dir.path().join("mn.json");
    let o = simnet(&["convert", &fixture("sb.json"), "-o", mn.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let ev = write(&dir, "e.json", r#"{"g": "female", "l": "no"}"#);
    let a = posterior(&infer(&fixture("sb.json"), &ev, "multinet"));
    let b = posterior(&infer(mn.to_str().unwrap(), &ev, "multinet"));
    let c = posterior(&infer(mn.to_str().unwrap(), &ev, "global"));
    assert_eq!(a, b);
    assert!(close(&b, &c, 1e-9));
    assert_eq!(code(&infer(mn.to_str().unwrap(), &ev, "sinet")), 4);
}

fn build(dir: &TempDir, name: &str, kind: &str) -> String {
    let out = dir.path().join(name);
    let o = simnet(&[
        "build",
        &fixture("sb-joint.json"),
        "--hypothesis",
        "h",
        "--cover",
        "spy,visitor;visitor,worker;worker,executive",
        "--type",
        kind,
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    out.to_str().unwrap().to_string()
}

fn node_sets(path: &str) -> Vec<Vec<String>> {
    let v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    v["local_networks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| serde_json::from_value(l["nodes"].clone()).unwrap())
        .collect()
}

#[test]
fn build_reproduces_the_sb_structure() {
    let dir = TempDir::new().unwrap();
    let one = build(&dir, "one.json", "1");
    assert_eq!(fs::read_to_string(&one).unwrap(), fs::read_to_string(fixture("sb.json")).unwrap());
    let sets = node_sets(&one);
    assert_eq!(sets[2], ["h", "l"]);
    assert_eq!(sets[0], ["h", "g", "b"]);
}

#[test]
fn type2_build_stays_within_type1_and_is_refused_by_convert() {
    let dir = TempDir::new().unwrap();
    let one = node_sets(&build(&dir, "one.json", "1"));
    let two_path = build(&dir, "two.json", "2");
    for (a, b) in one.iter().zip(node_sets(&two_path)) {
        assert!(b.iter().all(|v| a.contains(v)), "{b:?} vs {a:?}");
    }
    let o = simnet(&["convert", &two_path]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("conjecture"));
    assert_eq!(code(&simnet(&["convert", &two_path, "--experimental-type2"])), 0);
}

#[test]
fn unspecified_kind_needs_assume_type1() {
    let dir = TempDir::new().unwrap();
    let text = edit_json(&fixture("sb.json"), |v| v["kind"] = Value::from("unspecified"));
    let path = write(&dir, "m.json", &text);
    assert_eq!(code(&simnet(&["convert", &path])), 4);
    assert_eq!(code(&simnet(&["convert", &path, "--assume-type1"])), 0);
}

#[test]
fn single_cell_cover_gives_one_local_network() {
    let o = simnet(&["build", &fixture("mc3-joint.json"), "--hypothesis", "x", "--cover", "x0,x1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["local_networks"].as_array().unwrap().len(), 1);
    assert_eq!(v["local_networks"][0]["nodes"], serde_json::json!(["x", "y", "z"]));
}

#[test]
fn build_rejects_invalid_covers_and_budgets() {
    let joint = fixture("sb-joint.json");
    let o = simnet(&["build", &joint, "--hypothesis", "h", "--cover", "spy,visitor;worker,executive"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("not connected"));
    let o = simnet(&["build", &joint, "--hypothesis", "h", "--cover", "spy,visitor,worker,executive", "--cell-budget", "8"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("budget"));
}

#[test]
fn check_reports_consistency() {
    let o = simnet(&["check", &fixture("sb.json")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("consistent"));

    // h1 and h2 share two cells whose local priors disagree
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("cycle.json");
    let o = simnet(&[
        "build", &fixture("toy3p-joint.json"), "--hypothesis", "h", "--cover", "h1,h2;h2,h3;h1,h2,h3",
        "-o", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = edit_json(out.to_str().unwrap(), |v| {
        v["local_networks"][2]["cpts"]["h"]["rows"][""] = serde_json::json!([0.5, 0.25, 0.25]);
    });
    let bad = write(&dir, "bad.json", &text);
    let o = simnet(&["check", &bad]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("h1/h2"), "{}", stdout(&o));
    let o = simnet(&["infer", &bad, "--mode", "sinet"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("inconsistent"), "{}", stderr(&o));
}

fn bench(extra: &[&str]) -> Value {
    let mut args = vec!["bench", "--json"];
    args.extend_from_slice(extra);
    let o = simnet(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    json(&o)
}

#[test]
fn bench_counts_are_deterministic() {
    let args = ["--hypotheses", "5", "--vars-per-local", "3", "--total", "8", "--seed", "4"];
    let (a, b) = (bench(&args), bench(&args));
    assert_eq!(a["sinet"]["cells_touched"], b["sinet"]["cells_touched"]);
    assert_eq!(a["global"]["cells_touched"], b["global"]["cells_touched"]);
    assert_eq!(a["sinet"]["cells_touched"], Value::from(4 * 2 * 8));
    assert_eq!(a["global"]["cells_touched"], Value::from(5 * 256));
}

#[test]
fn bench_single_local_has_ratio_one() {
    let v = bench(&["--hypotheses", "2", "--vars-per-local", "5", "--total", "5"]);
    assert_eq!(v["sinet"]["cells_touched"], v["global"]["cells_touched"]);
}

#[test]
fn bench_skips_global_over_budget() {
    let o = simnet(&["bench", "--cell-budget", "2000"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("skipped (budget)"));
}

#[test]
fn missing_files_are_reported() {
    let o = simnet(&["validate", Path::new("/nonexistent/model.json").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("reading"));
}
