use std::path::Path;
use std::process::{Command, Output};

fn rmlt(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmlt"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(p: impl AsRef<Path>) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn empty_case_list_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = rmlt(dir.path(), &["search"]);
    assert_eq!(o.status.code(), Some(2));
    let o = rmlt(dir.path(), &["search", "--case"]);
    assert_eq!(o.status.code(), Some(2));
    let o = rmlt(dir.path(), &["search", "--case", "4.z"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn search_then_classify() {
    let dir = tempfile::tempdir().unwrap();
    let o = rmlt(dir.path(), &["search", "--case", "4.b,4.f,4.g"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = read(dir.path().join("search.csv"));
    assert!(summary.contains("4.b,127,12"), "{summary}");
    assert!(summary.contains("4.g,1039,9"), "{summary}");
    assert_eq!(read(dir.path().join("cliques/4.b.jsonl")).lines().count(), 12);

    let o = rmlt(dir.path(), &["classify", "--case", "4.f"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = read(dir.path().join("classification.csv"));
    assert!(table.contains("4.f,6,2,0,0"), "{table}");

    let o = rmlt(dir.path(), &["report"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("search,4.b,cliques,12,12,ok"));
}

#[test]
fn classify_needs_cliques() {
    let dir = tempfile::tempdir().unwrap();
    let o = rmlt(dir.path(), &["classify", "--case", "4.b"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing input"));
}

#[test]
fn outputs_are_reproducible_and_resumable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = rmlt(d.path(), &["--format", "json", "search", "--case", "4.a"]);
        assert!(o.status.success());
    }
    for f in ["search.json", "cliques/4.a-48.jsonl", "cliques/4.a-96.jsonl", "checks/search.json"] {
        assert_eq!(read(a.path().join(f)), read(b.path().join(f)), "{f}");
    }
    // a second run is served from the cache
    let o = rmlt(a.path(), &["search", "--case", "4.a-48"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("from cache"));
}

#[test]
fn mismatched_expectations_fail() {
    let dir = tempfile::tempdir().unwrap();
    let builtin: serde_json::Value = serde_json::from_str(&read(concat!(env!("CARGO_MANIFEST_DIR"), "/expectations.json"))).unwrap();
    let mut e = builtin.clone();
    e["search"]["4.b"] = 13.into();
    let path = dir.path().join("expect.json");
    std::fs::write(&path, e.to_string()).unwrap();
    let o = rmlt(dir.path(), &["--expectations", path.to_str().unwrap(), "search", "--case", "4.b"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("MISMATCH"));

    let mut e = builtin;
    e["version"] = 99.into();
    std::fs::write(&path, e.to_string()).unwrap();
    let o = rmlt(dir.path(), &["--expectations", path.to_str().unwrap(), "search", "--case", "4.b"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("version"));
}

#[test]
fn obstruct_a6_and_missing_asset() {
    let dir = tempfile::tempdir().unwrap();
    let o = rmlt(dir.path(), &["obstruct", "--case", "4.k,4.m"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&read(dir.path().join("obstruct.json"))).unwrap();
    let certs = v["certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 2);
    for c in certs {
        assert_eq!(c["hypothesis_holds"], true);
        assert_eq!(c["intersection_sizes"], serde_json::json!([0, 2]));
    }
    let verdicts = read(dir.path().join("verdicts.csv"));
    assert!(verdicts.contains("4.m,skipped: no construction"), "{verdicts}");
}

#[test]
fn obstruct_rejects_cases_without_an_obstruction() {
    let dir = tempfile::tempdir().unwrap();
    let o = rmlt(dir.path(), &["obstruct", "--case", "4.b"]);
    assert_eq!(o.status.code(), Some(1));
}
