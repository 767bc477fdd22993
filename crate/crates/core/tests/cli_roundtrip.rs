use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxspec")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("maxspec-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn spectrum_of_dense_file() {
    let p = data("three_cycle.json");
    let v = json(&["spectrum", "--input", p.to_str().unwrap()]);
    let mu = v["mu"].as_f64().unwrap();
    assert!((mu - 24f64.powf(1.0 / 3.0)).abs() < 1e-12);
    assert_eq!(v["radius"], v["mu"]);
    let mut idx: Vec<u64> = v["critical_witness"]["indices"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    idx.sort();
    assert_eq!(idx, vec![1, 2, 3]);
    assert_eq!(v["config"]["command"], "spectrum");
}

#[test]
fn blocks_of_sparse_file() {
    let p = data("reducible.json");
    let v = json(&["blocks", "--input", p.to_str().unwrap()]);
    assert_eq!(v["classes"], serde_json::json!([[1, 2], [3], [4]]));
    assert_eq!(v["class_radii"], serde_json::json!([1.0, 0.7, 0.0]));
    let levels: Vec<f64> = v["levels"].as_array().unwrap().iter().map(|l| l["value"].as_f64().unwrap()).collect();
    assert_eq!(levels, vec![1.0, 0.7, 0.0]);
}

#[test]
fn banded_oracle_estimate() {
    let p = data("banded.json");
    let v = json(&["estimate", "mu", "--input", p.to_str().unwrap(), "--N", "64"]);
    let lower = v["lower"].as_f64().unwrap();
    let upper = v["upper"].as_f64().unwrap_or(f64::INFINITY);
    assert!(lower <= upper);
    let sched = v["schedule"].as_array().unwrap();
    let vals: Vec<f64> = sched.iter().map(|s| s["value"].as_f64().unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn gallery_listing_and_show() {
    let v = json(&["gallery", "list"]);
    assert!(v.to_string().contains("kakutani"));
    let s = json(&["gallery", "show", "star_means"]);
    assert!(s.to_string().contains("star_means"));
}

#[test]
fn csv_schedule() {
    let out = run(&["--format", "csv", "estimate", "mu", "--gallery", "star_means", "--N", "64"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,value");
    assert_eq!(lines[1..], ["16,0.9375", "32,0.96875", "64,0.984375"]);
}

#[test]
fn output_file_matches_stdout() {
    let target = std::env::temp_dir().join(format!("maxspec-out-{}.json", std::process::id()));
    let out = run(&["estimate", "local", "--gallery", "diag_inverse", "--params", "j=3", "--N", "32", "--output", target.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v["lower"].as_f64(), Some(1.0 / 3.0));
    std::fs::remove_file(target).ok();
}

#[test]
fn kakutani_radius_reports_heuristic() {
    let v = json(&["estimate", "r", "--gallery", "kakutani", "--N", "2048", "--K", "1024"]);
    assert_eq!(v["lower"].as_f64(), Some(0.0));
    assert!((v["heuristic"].as_f64().unwrap() - 0.50034).abs() < 1e-4);
    assert_eq!(v["converged"], Value::Bool(false));
}

#[test]
fn exit_codes() {
    let dup = scratch("dup.json", r#"{"n":2,"triplets":[[1,1,0.5],[1,1,0.7]]}"#);
    let out = run(&["spectrum", "--input", dup.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate"));

    let lying = scratch("lying.json", r#"{"kind":"banded","norm_bound":0.1,"bands":[{"offset":1,"value":1.0}]}"#);
    assert_eq!(run(&["estimate", "mu", "--input", lying.to_str().unwrap()]).status.code(), Some(3));

    assert_eq!(run(&["estimate", "r", "--gallery", "kakutani", "--N", "100000"]).status.code(), Some(4));
    assert_eq!(run(&["gallery", "show", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["estimate", "mu", "--gallery", "epsilon_cycle", "--params", "eps=0.5,bogus=1"]).status.code(), Some(2));
    assert_eq!(run(&["estimate", "mu", "--gallery", "epsilon_cycle", "--params", "eps=0.5", "--params", "eps=0.25"]).status.code(), Some(2));
}

#[test]
fn probe_kakutani_rows() {
    let v = json(&["probe", "kakutani", "--params", "m_max=6"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r["power_vanishes"] == Value::Bool(true)));
}
