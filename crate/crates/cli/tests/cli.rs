//! End-to-end tests driving the compiled binary.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_groupwalk"))
}

fn fixture(name: &str, content: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("groupwalk-cli-{}-{name}", std::process::id()));
    fs::write(&path, content).unwrap();
    path
}

fn mixed_graph() -> PathBuf {
    fixture(
        "mixed.json",
        r#"{"nodes":[{"id":"a","vote":"+"},{"id":"b","vote":"-"},{"id":"u"}],"edges":[{"from":"u","to":"a","mult":2},{"from":"u","to":"b"}]}"#,
    )
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

#[test]
fn recommend_prints_a_sign() {
    let graph = mixed_graph();
    let output = bin()
        .args(["recommend", "--graph"])
        .arg(&graph)
        .args(["--group", "a,u"])
        .output()
        .unwrap();
    assert!(output.status.success());
    assert_eq!(stdout_of(&output), "+\n");
}

#[test]
fn recommend_honors_the_system_flag() {
    let graph = fixture(
        "dominated.json",
        r#"{"nodes":[{"id":"a","vote":"+"},{"id":"b","vote":"-"},{"id":"u"}],"edges":[{"from":"u","to":"b","mult":2}]}"#,
    );
    let walk = bin()
        .args(["recommend", "--graph"])
        .arg(&graph)
        .args(["--group", "a,u", "--system", "random-walk"])
        .output()
        .unwrap();
    assert_eq!(stdout_of(&walk), "0\n");
    let majority = bin()
        .args(["recommend", "--graph"])
        .arg(&graph)
        .args(["--group", "a,u", "--system", "inside-majority"])
        .output()
        .unwrap();
    assert_eq!(stdout_of(&majority), "+\n");
}

#[test]
fn solve_prints_exact_fractions() {
    let graph = mixed_graph();
    let output = bin().args(["solve", "--graph"]).arg(&graph).output().unwrap();
    let text = stdout_of(&output);
    assert!(text.contains("u = 1/3"), "got: {text}");
    assert!(text.contains("a = 1"));
    assert!(text.contains("b = -1"));
    let decimal = bin()
        .args(["solve", "--decimal", "--graph"])
        .arg(&graph)
        .output()
        .unwrap();
    assert!(stdout_of(&decimal).contains("u = 1/3 (0.333333)"));
}

#[test]
fn check_all_emits_nine_reports() {
    let graph = mixed_graph();
    let output = bin()
        .args(["check", "--axiom", "all", "--graph"])
        .arg(&graph)
        .args(["--group", "a,u", "--trials", "10", "--seed", "7"])
        .args(["--alpha", "2", "--beta", "3", "--r", "1"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let lines: Vec<Value> = stdout_of(&output)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 9);
    for (i, line) in lines.iter().enumerate() {
        assert_eq!(line["axiom"], Value::from(i as u64 + 1));
    }
}

#[test]
fn check_exit_code_reflects_violations() {
    let graph = fixture(
        "minus-singleton.json",
        r#"{"nodes":[{"id":"b","vote":"-"}],"edges":[]}"#,
    );
    let status = bin()
        .args(["check", "--axiom", "1", "--graph"])
        .arg(&graph)
        .args(["--group", "b", "--system", "singleton-plus", "--trials", "5"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_two() {
    let missing = bin()
        .args(["solve", "--graph", "/nonexistent/graph.json"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
    assert!(!String::from_utf8(missing.stderr).unwrap().is_empty());

    let graph = mixed_graph();
    let empty_group = bin()
        .args(["recommend", "--graph"])
        .arg(&graph)
        .args(["--group", ""])
        .output()
        .unwrap();
    assert_eq!(empty_group.status.code(), Some(2));

    let alpha_missing = bin()
        .args(["check", "--axiom", "4", "--graph"])
        .arg(&graph)
        .args(["--group", "a,u"])
        .output()
        .unwrap();
    assert_eq!(alpha_missing.status.code(), Some(2));
}

#[test]
fn witness_emits_derived_arithmetic() {
    let output = bin()
        .args(["witness", "--alpha", "2", "--beta", "2.5", "--r", "1"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let doc: Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(doc["meta"]["ell"], Value::from(2));
    assert_eq!(doc["meta"]["k"], Value::from(4));
    assert_eq!(doc["meta"]["s"], Value::from(8));
    assert_eq!(doc["nodes"].as_array().unwrap().len(), 40);
    assert_eq!(doc["partition"].as_array().unwrap().len(), 4);
}

#[test]
fn witness_verify_round_trips_through_a_file() {
    let path = std::env::temp_dir().join(format!("groupwalk-cli-{}-w.json", std::process::id()));
    let built = bin()
        .args(["witness", "--alpha", "2", "--beta", "2.5", "--r", "1", "--out"])
        .arg(&path)
        .status()
        .unwrap();
    assert!(built.success());
    let output = bin()
        .args(["witness-verify", "--system", "random-walk", "--in"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(output.status.success());
    let verdict: Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    let contradicted = verdict["contradicted"].as_array().unwrap();
    assert!(!contradicted.is_empty());
    assert!(contradicted
        .iter()
        .all(|v| (4..=6).contains(&v.as_u64().unwrap())));
}

#[test]
fn reduce_emits_a_step_array() {
    let graph = mixed_graph();
    let output = bin()
        .args(["reduce", "--graph"])
        .arg(&graph)
        .args(["--group", "a,u"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let steps: Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    let steps = steps.as_array().unwrap();
    assert!(!steps.is_empty());
    for step in steps {
        assert!(step["kind"].is_string());
        assert!(step["before"]["nodes"].is_array());
        assert!(step["after"]["nodes"].is_array());
    }
}

#[test]
fn transform_applies_a_single_rewrite() {
    let graph = fixture(
        "chain.json",
        r#"{"nodes":[{"id":"u"},{"id":"v"},{"id":"a","vote":"+"}],"edges":[{"from":"u","to":"v"},{"from":"v","to":"a"}]}"#,
    );
    let output = bin()
        .args(["transform", "--kind", "trust-propagation", "--graph"])
        .arg(&graph)
        .args(["--u", "u", "--v", "v"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let doc: Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    let edges = doc["edges"].as_array().unwrap();
    assert!(edges
        .iter()
        .any(|e| e["from"] == "u" && e["to"] == "a"));
    assert!(!edges.iter().any(|e| e["from"] == "u" && e["to"] == "v"));
}

#[test]
fn gen_star_feeds_the_other_commands() {
    let star = std::env::temp_dir().join(format!("groupwalk-cli-{}-star.json", std::process::id()));
    let status = bin()
        .args(["gen-star", "--n", "2", "--m", "3", "--inner", "+"])
        .args(["--degrees", "3,3,2", "--out"])
        .arg(&star)
        .status()
        .unwrap();
    assert!(status.success());
    let doc: Value = serde_json::from_str(&fs::read_to_string(&star).unwrap()).unwrap();
    let group: Vec<&str> = doc["group"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(group, ["u1", "u2", "u3", "v1", "v2"]);
    let recommend = bin()
        .args(["recommend", "--graph"])
        .arg(&star)
        .args(["--group", &group.join(",")])
        .output()
        .unwrap();
    assert_eq!(stdout_of(&recommend), "+\n");
}

#[test]
fn witness_files_work_as_plain_graphs() {
    let path = std::env::temp_dir().join(format!(
        "groupwalk-cli-{}-w-as-graph.json",
        std::process::id()
    ));
    let built = bin()
        .args(["witness", "--alpha", "2", "--beta", "2", "--r", "1", "--out"])
        .arg(&path)
        .status()
        .unwrap();
    assert!(built.success());
    // The extra partition/meta fields are ignored by graph consumers.
    let solve = bin().args(["solve", "--graph"]).arg(&path).output().unwrap();
    assert!(solve.status.success());
    assert!(stdout_of(&solve).contains("v1 = 1"));
    let recommend = bin()
        .args(["recommend", "--graph"])
        .arg(&path)
        .args(["--group", "v1,u1"])
        .output()
        .unwrap();
    assert!(recommend.status.success());
}

#[test]
fn export_dot_renders_votes_and_multiplicities() {
    let graph = mixed_graph();
    let output = bin()
        .args(["export-dot", "--graph"])
        .arg(&graph)
        .output()
        .unwrap();
    let dot = stdout_of(&output);
    assert!(dot.contains("\"a\" [label=\"a (+)\"]"));
    assert!(dot.contains("\"b\" [label=\"b (-)\"]"));
    assert!(dot.contains("\"u\" -> \"a\" [label=\"2\"]"));
}
