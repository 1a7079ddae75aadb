use std::path::{Path, PathBuf};
use std::process::Command;

use fixsize_core::network::fixtures::{butterfly, pigeonhole};
use fixsize_core::network::{deserialize, serialize, validate};
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).expect("stdout is JSON")
    }
}

fn fixsize(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_fixsize")).args(args).output().unwrap();
    Run { code: out.status.code().unwrap(), stdout: String::from_utf8(out.stdout).unwrap() }
}

fn put(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_butterfly() {
    let dir = TempDir::new().unwrap();
    let net = put(&dir, "butterfly.json", &serialize(&butterfly()).unwrap());
    let r = fixsize(&["solve", s(&net), "--k", "2"]);
    assert_eq!(r.code, 0);
    let v = r.json();
    assert_eq!(v["status"], "solvable");
    assert!(v["scheme"]["encodings"].is_object());
}

#[test]
fn sweep_reports_not_found_with_caveat() {
    let dir = TempDir::new().unwrap();
    let net = put(&dir, "pigeonhole.json", &serialize(&pigeonhole()).unwrap());
    let r = fixsize(&["sweep", s(&net), "--k-max", "4"]);
    assert_eq!(r.code, 1);
    let v = r.json();
    assert!(v["found"].is_null());
    assert!(v["note"].as_str().unwrap().contains("does not show"));
    assert!(v["results"].as_array().unwrap().iter().all(|x| x["status"] == "unsolvable_at_k"));
}

#[test]
fn verify_xor_checker() {
    let r = fixsize(&["verify-checker", "xor", "--k", "2"]);
    assert_eq!(r.code, 0);
    let v = r.json();
    assert_eq!(v["candidates"], 16);
    assert_eq!(v["accepted"].as_array().unwrap().len(), 2);
    assert_eq!(v["oracles_agree"], true);
}

#[test]
fn budget_exhaustion_is_not_a_negative() {
    let dir = TempDir::new().unwrap();
    let program = put(&dir, "p.json", r#"{"colors":2,"conditions":[{"type":"edge_eq","orientation":"h","set":[1]}]}"#);
    let net = dir.path().join("r.json");
    assert_eq!(fixsize(&["reduce", s(&program), "-o", s(&net)]).code, 0);
    let r = fixsize(&["solve", s(&net), "--k", "2", "--budget", "50"]);
    assert_eq!(r.code, 2);
    assert_ne!(r.json()["status"], "unsolvable_at_k");
}

#[test]
fn input_errors_exit_three() {
    let dir = TempDir::new().unwrap();
    let bad = put(&dir, "bad.json", "{not json");
    assert_eq!(fixsize(&["solve", s(&bad), "--k", "1"]).code, 3);
    assert_eq!(fixsize(&["solve", "missing.json", "--k", "1"]).code, 3);
    assert_eq!(fixsize(&["solve"]).code, 3);
    assert_eq!(fixsize(&["gadget-build", "nonsense", "-o", "x.json"]).code, 3);
    let r = fixsize(&["index", s(&bad), "--k", "1"]);
    assert_eq!(r.json()["status"], "input_error");
}

#[test]
fn deterministic_output_is_stable_across_workers() {
    let dir = TempDir::new().unwrap();
    let net = put(&dir, "butterfly.json", &serialize(&butterfly()).unwrap());
    let runs: Vec<String> = ["1", "4", "4"]
        .iter()
        .map(|j| fixsize(&["solve", s(&net), "--k", "2", "--deterministic", "--jobs", j]).stdout)
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[1], runs[2]);
}

#[test]
fn gadget_build_writes_a_valid_network() {
    let dir = TempDir::new().unwrap();
    let theta = put(&dir, "theta.json", "[[1,0,0],[0,1,0],[0,0,1]]");
    let out = dir.path().join("set.json");
    let r = fixsize(&["gadget-build", "set_checker", "--theta", s(&theta), "-o", s(&out)]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["checker"], true);
    let net = deserialize(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(validate(&net).ok);
    let v = fixsize(&["validate", s(&out)]);
    assert_eq!((v.code, v.json()["ok"].clone()), (0, Value::Bool(true)));
}

#[test]
fn torus_and_index_decisions() {
    let dir = TempDir::new().unwrap();
    let bad = put(
        &dir,
        "c.json",
        r#"{"colors":2,"conditions":[
            {"type":"edge_eq","orientation":"h","set":[1]},
            {"type":"edge_or","orientation":"h","set":[1]},
            {"type":"edge_or","orientation":"h","set":[2]}]}"#,
    );
    let r = fixsize(&["torus", s(&bad), "--width", "2", "--height", "2"]);
    assert_eq!((r.code, r.json()["found"].clone()), (1, Value::Bool(false)));
    assert_eq!(fixsize(&["torus", s(&bad), "--width", "8", "--height", "8"]).code, 2);
    assert_eq!(fixsize(&["torus", s(&bad), "--width", "3", "--height", "2"]).code, 3);

    let one = put(&dir, "i.json", r#"{"messages":[null],"a":1,"b":1,"clients":[{"has":[],"wants":[1]}]}"#);
    let r = fixsize(&["index", s(&one), "--k", "3"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["encoder"], serde_json::json!([0, 1, 2]));
    let tight = put(&dir, "j.json", r#"{"messages":[2],"a":1,"b":0,"clients":[{"has":[],"wants":[1]}]}"#);
    assert_eq!(fixsize(&["index", s(&tight), "--k", "2"]).code, 1);
}

#[test]
fn export_dot_writes_graphviz() {
    let dir = TempDir::new().unwrap();
    let net = put(&dir, "b.json", &serialize(&butterfly()).unwrap());
    let out = dir.path().join("b.dot");
    let r = fixsize(&["export-dot", s(&net), "-o", s(&out)]);
    assert_eq!(r.code, 0);
    let dot = std::fs::read_to_string(&out).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(r.json()["dot"], dot);
}
