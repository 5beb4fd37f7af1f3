use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn exactkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exactkit")).args(args).output().unwrap()
}

fn golden(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    std::fs::read_to_string(path).unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn ext_table_json() {
    let out = exactkit(&["ext-table", "--nilpotency", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["schema"], "exactkit-report/1");
    assert_eq!(doc["prng"], "xorshift64*-v1");
    assert_eq!(doc["status"], "pass");
    assert_eq!(doc["config"]["N"], 3);
    assert_eq!(doc["config"]["D"], 3);
    assert_eq!(doc["result"]["dims"], serde_json::json!([[1, 1, 0], [1, 1, 0], [0, 0, 0]]));
    assert!(stdout(&out).ends_with("}\n"));
}

#[test]
fn ext_table_tsv_golden() {
    let out = exactkit(&["ext-table", "--p", "3", "--nilpotency", "4", "--format", "tsv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), golden("ext_table_p3_n4.tsv"));
}

#[test]
fn enumerate_golden() {
    let args = ["enumerate", "--p", "2", "--nilpotency", "3", "--seed", "42"];
    let out = exactkit(&args);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), golden("enumerate_p2_n3_seed42.json"));
    let tsv = exactkit(&[&args[..], &["--format", "tsv"]].concat());
    assert_eq!(stdout(&tsv), golden("enumerate_p2_n3_seed42.tsv"));
}

#[test]
fn subcategory_golden() {
    let out = exactkit(&["subcategory", "--p", "2", "--nilpotency", "3", "--generators", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), golden("subcategory_p2_n3_gen2.json"));
}

#[test]
fn subcategory_variants_are_closed() {
    for variant in ["cov", "contra"] {
        let out = exactkit(&["subcategory", "--nilpotency", "3", "--generators", "1,3", "--variant", variant]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn verify_core_passes() {
    let out = exactkit(&["verify-core", "--nilpotency", "3", "--trials", "50", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["status"], "pass");
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let args = ["ext-table", "--nilpotency", "4"];
    let written = exactkit(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert_eq!(written.status.code(), Some(0));
    assert!(written.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["config"]["out"], path.to_str().unwrap());
    assert_eq!(doc["result"], serde_json::from_str::<Value>(&stdout(&exactkit(&args))).unwrap()["result"]);
}

#[test]
fn guard_exits_with_3() {
    let out = exactkit(&["enumerate", "--p", "65521", "--nilpotency", "4"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_with_2() {
    for args in [
        &["enumerate", "--nilpotency", "0"][..],
        &["ext-table", "--p", "4"],
        &["ext-table", "--nilpotency", "4", "--max-dim", "2"],
        &["subcategory", "--nilpotency", "3", "--generators", "4"],
        &["subcategory", "--nilpotency", "3"],
        &["ext-table", "--jobs", "0"],
        &["no-such-command"],
    ] {
        let out = exactkit(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn help_exits_with_0() {
    assert_eq!(exactkit(&["--help"]).status.code(), Some(0));
}

#[cfg(feature = "fault-injection")]
#[test]
fn injected_fault_exits_with_1() {
    let out = exactkit(&["verify-core", "--trials", "20", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["status"], "fail");
}

fn tsv(args: &[&str]) -> Vec<Vec<String>> {
    let out = exactkit(&[args, &["--format", "tsv"]].concat());
    assert_eq!(out.status.code(), Some(0), "{args:?}");
    stdout(&out)
        .lines()
        .map(|l| l.split('\t').map(String::from).collect())
        .collect()
}

#[test]
fn small_enumerations() {
    let one = tsv(&["enumerate", "--nilpotency", "1"]);
    assert_eq!(one.len(), 2);
    assert!(one[1][2..8].iter().all(|v| v == "true"));
    let two = tsv(&["enumerate", "--nilpotency", "2"]);
    let labels: Vec<_> = two[1..].iter().map(|r| r[1].as_str()).collect();
    assert_eq!(labels, ["{1,1:0/1}", "{1,1:1/1}"]);
    assert!(two[1..].iter().all(|r| r[2..8].iter().all(|v| v == "true")));
}

#[test]
fn subcategory_examples() {
    let simple = tsv(&["subcategory", "--nilpotency", "2", "--generators", "1"]);
    assert_eq!(simple[1], ["U_1,1", "0/1"]);
    assert!(simple.contains(&vec!["closed".to_string(), "true".to_string()]));
    let projective = tsv(&["subcategory", "--nilpotency", "3", "--generators", "3"]);
    for row in &projective[1..10] {
        let (dim, ext) = row[1].split_once('/').unwrap();
        assert_eq!(dim, ext, "{row:?}");
    }
}

#[test]
fn verify_core_at_n2_with_200_trials() {
    let out = exactkit(&["verify-core", "--nilpotency", "2", "--trials", "200", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn zero_trials_warns() {
    let out = exactkit(&["verify-core", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc["result"]["warning"].is_string());
}
