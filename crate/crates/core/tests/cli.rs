//! The `orienteer` binary end to end.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orienteer")).args(args).env_remove("ORIENTEER_SEED").output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("orienteer-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn gen(kind: &str, params: &str, seed: &str, name: &str) -> PathBuf {
    let path = scratch(name);
    let out = bin(&["gen", kind, "--params", params, "--seed", seed, "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn gen_is_byte_identical_per_seed() {
    let a = bin(&["gen", "euclidean", "--n", "8", "--seed", "1"]);
    let b = bin(&["gen", "euclidean", "--n", "8", "--seed", "1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = Command::new(env!("CARGO_BIN_EXE_orienteer")).args(["gen", "euclidean", "--n", "8"]).env("ORIENTEER_SEED", "1").output().unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn exit_codes() {
    let inst = gen("euclidean", r#"{"n":6,"with_end":true,"k_min":3}"#, "2", "codes.json");
    let p = inst.to_str().unwrap();
    let infeasible = bin(&["solve", "p2p", p, "--budget", "0", "--json"]);
    assert_eq!(infeasible.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&infeasible.stdout).contains("infeasible"));
    assert_eq!(bin(&["solve", "deadline", p]).status.code(), Some(1));
    assert_eq!(bin(&["solve", "kstroll", "/nonexistent.json"]).status.code(), Some(1));
    assert_eq!(bin(&["solve", "kstroll", p]).status.code(), Some(0));
}

#[test]
fn reports_verify_and_tampering_is_caught() {
    let inst = gen("bounded", r#"{"n":7,"deadlines":true}"#, "3", "dl.json");
    let report = scratch("dl-report.json");
    let (i, r) = (inst.to_str().unwrap(), report.to_str().unwrap());
    let out = bin(&["solve", "deadline", i, "--oracle", "--m-max", "3", "--out", r]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let ratio = v["ratio"].as_f64().unwrap();
    assert!((0.5..=1.0).contains(&ratio));
    assert_eq!(bin(&["verify", i, r]).status.code(), Some(0));

    let mut bad = v.clone();
    bad["result"]["value"] = (v["result"]["value"].as_i64().unwrap() + 1).into();
    std::fs::write(&report, serde_json::to_string(&bad).unwrap()).unwrap();
    assert_eq!(bin(&["verify", i, r]).status.code(), Some(1));
}

#[test]
fn kstroll_bench_succeeds_on_most_seeds() {
    let suite = scratch("suite.json");
    std::fs::write(
        &suite,
        r#"{"cells":[{"generator":"euclidean","params":{"n":10,"k_min":4,"with_end":true},
            "solver":{"command":"kstroll","oracle":true,"timing":false},"seeds":[0,1,2,3,4,5,6,7,8,9]}]}"#,
    )
    .unwrap();
    let out = bin(&["bench", suite.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(rows[0]["success_rate"].as_f64().unwrap() >= 0.9);
    let again = bin(&["bench", suite.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.stdout, again.stdout);
    std::fs::write(&suite, r#"{"cells":[]}"#).unwrap();
    let empty = bin(&["bench", suite.to_str().unwrap()]);
    assert_eq!(String::from_utf8_lossy(&empty.stdout).lines().count(), 1);
}

#[test]
fn calibration_feeds_the_solver() {
    let inst = gen("euclidean", r#"{"n":7,"with_end":true,"k_min":4}"#, "5", "cal-inst.json");
    let cal = scratch("cal.json");
    let (i, c) = (inst.to_str().unwrap(), cal.to_str().unwrap());
    assert!(bin(&["calibrate", i, "--trials", "50"]).status.code() == Some(1));
    assert!(bin(&["calibrate", i, "--trials", "500", "--out", c]).status.success());
    let out = bin(&["solve", "kstroll", i, "--calibration", c, "--json", "--no-timing"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let k: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cal).unwrap()).unwrap();
    assert_eq!(v["config"]["kappa_prime"], k["kappa_prime"]);
    let dump = bin(&["decompose", i, "--kind", "tree-decomposition"]);
    assert!(String::from_utf8_lossy(&dump.stdout).contains("\"valid\": true"));
}
