use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pseudoarc(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pseudoarc")).arg("--out").arg(out).args(args).output().expect("run pseudoarc")
}

fn manifest(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn odometer_two_eight() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k");
    let o = pseudoarc(&out, &["odometer", "build-k", "--kseq", "2,8", "--depth", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let m = manifest(&out);
    assert_eq!(m["status"], "ok");
    assert_eq!(m["summary"]["measure"], "47/256");
    assert!(m["artifacts"]["k.json"].as_str().unwrap().len() == 64);

    let again = dir.path().join("verify");
    let o = pseudoarc(&again, &["odometer", "verify", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn failing_sequence_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = pseudoarc(dir.path(), &["rees", "generate", "--kseq", "2,8,261"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!manifest(dir.path())["verdicts"]["failed"].as_array().unwrap().is_empty());
}

#[test]
fn crookedness_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let o = pseudoarc(dir.path(), &["check-crooked", "--map", "tent", "--eps", "1/2"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("verdict.json")).unwrap()).unwrap();
    assert_eq!(v["status"], "NOT_CROOKED");
}

#[test]
fn bad_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = pseudoarc(dir.path(), &["entropy", "sft", "--rate", "inf"]);
    assert_eq!(o.status.code(), Some(2));

    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "").unwrap();
    let out = dir.path().join("csv");
    let o = pseudoarc(&out, &["export", "csv", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let m = manifest(&out);
    assert_eq!(m["status"], "stale");
    assert!(m["error"].as_str().unwrap().contains("empty"));
}

#[test]
fn svg_links() {
    let dir = tempfile::tempdir().unwrap();
    let o = pseudoarc(dir.path(), &["export", "svg", "--eps", "1/4"]);
    assert_eq!(o.status.code(), Some(0));
    let svg = std::fs::read_to_string(dir.path().join("chains.svg")).unwrap();
    assert_eq!(svg.matches("class=\"link\"").count(), 17);
    assert!(svg.starts_with("<svg"));
}

#[test]
fn entropy_table_to_csv() {
    let dir = tempfile::tempdir().unwrap();
    let lap = dir.path().join("lap");
    let o = pseudoarc(&lap, &["entropy", "pl", "--map", "tent", "--nmax", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let out = dir.path().join("csv");
    let o = pseudoarc(&out, &["export", "csv", lap.join("table.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let mut rd = csv::Reader::from_path(out.join("table.csv")).unwrap();
    assert_eq!(rd.headers().unwrap(), vec!["n", "count", "estimate"]);
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    let last = rows.last().unwrap();
    assert_eq!(&last[0], "8");
    assert_eq!(&last[1], "256");
}

#[test]
fn full_demo_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("demo");
    let mut seen = Vec::new();
    for _ in 0..2 {
        let _ = std::fs::remove_dir_all(&out);
        let o = pseudoarc(&out, &["--seed", "7", "full-demo", "--rate", "1.0"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
        seen.push(std::fs::read(out.join("manifest.json")).unwrap());
    }
    assert_eq!(seen[0], seen[1]);
    let m = manifest(&out);
    assert_eq!(m["config"]["seed"], 7);
    assert!(out.join("timing.json").exists());
}

#[test]
fn json_flag_prints_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = pseudoarc(dir.path(), &["--json", "entropy", "sft", "--rate", "0.6931"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "ok");
    assert_eq!(v["summary"]["sft"]["m"], 2);
}
