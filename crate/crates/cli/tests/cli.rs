use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

fn kh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kh")).args(args).env("KH_THREADS", "2").output().expect("kh runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap().trim().to_string()
}

#[test]
fn unknot_and_empty_tables() {
    let o = kh(&["kh", data("unknot.json").to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), r#"[{"h":0,"q":-1,"free":1},{"h":0,"q":1,"free":1}]"#);
    let o = kh(&["kh", data("empty.json").to_str().unwrap()]);
    assert_eq!(stdout(&o), r#"[{"h":0,"q":0,"free":1}]"#);
}

#[test]
fn open_tangles_need_caps() {
    let file = data("tangles/arc.json");
    let o = kh(&["kh", file.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("caps"));
    let o = kh(&["kh", file.to_str().unwrap(), "--caps", "1-2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), r#"[{"h":0,"q":-1,"free":1},{"h":0,"q":1,"free":1}]"#);
    let o = kh(&["kh", file.to_str().unwrap(), "--caps", "1-3"]);
    assert!(!o.status.success());
}

#[test]
fn broken_diagrams_are_diagnosed() {
    let dir = std::env::temp_dir().join(format!("kh-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("bad.json");
    std::fs::write(&file, r#"{"crossings":[[1,2,3,4]],"P":0}"#).unwrap();
    let o = kh(&["kh", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn torus_evaluates_to_two() {
    let o = kh(&["map", data("movies/torus.json").to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["chi"], 0);
    let entries = &v["closures"][0]["matrix"]["entries"];
    assert_eq!(entries.as_array().unwrap().len(), 1);
    assert_eq!(entries[0][2].as_i64().unwrap().abs(), 2);
}

#[test]
fn saddle_cone_is_a_shifted_table() {
    let o = kh(&["map", data("movies/saddle_5_2_k1.json").to_str().unwrap(), "--cone"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["q_degree"], 1);
    let expected = kh(&["kh", data("8_19.json").to_str().unwrap()]);
    let table: Vec<Value> = serde_json::from_str(&stdout(&expected)).unwrap();
    let shifted: Vec<Value> = table
        .into_iter()
        .map(|mut e| {
            e["h"] = (e["h"].as_i64().unwrap() - 2).into();
            e["q"] = (e["q"].as_i64().unwrap() - 7).into();
            e
        })
        .collect();
    assert_eq!(v["cone"], Value::Array(shifted));
}

#[test]
fn verify_reports_and_exit_codes() {
    let o = kh(&["verify", "--suite", "euler", "--seed", "3"]);
    assert!(o.status.success());
    let reports: Vec<Value> = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!reports.is_empty());
    assert!(reports.iter().all(|r| r["verdict"] == "passed"));
    let o = kh(&["verify", "--suite", "bogus"]);
    assert!(!o.status.success());
}

#[test]
fn verify_is_deterministic() {
    let a = stdout(&kh(&["verify", "--suite", "gluing", "--seed", "5"]));
    let b = stdout(&kh(&["verify", "--suite", "gluing", "--seed", "5"]));
    assert_eq!(a, b);
}
