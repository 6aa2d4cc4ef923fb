use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dilatation_lab::{run_text, EXIT_ERROR, EXIT_FAIL, EXIT_PASS};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dilatation-lab"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(config: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(config).args(extra).output().unwrap()
}

fn meta(csv: &str, key: &str) -> Option<String> {
    csv.lines().find_map(|l| l.strip_prefix(&format!("# {key}: ")).map(str::to_string))
}

const AXIOMS: &str = r#"{"model":{"model":"euclidean","n":2},"command":"axioms","which":"all","seed":1,"samples":8}"#;

#[test]
fn shipped_configs_parse_and_run() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let (_, report) = run_text(&text, None).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let expected = if path.ends_with("heisenberg_barycentric.json") { EXIT_FAIL } else { EXIT_PASS };
        assert_eq!(report.status, expected, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 8);
}

#[test]
fn passing_run_exits_zero_and_writes_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.json", AXIOMS);
    let out = dir.path().join("a.csv");
    let o = run(&cfg, &["--out", out.to_str().unwrap(), "--quiet"]);
    assert_eq!(o.status.code(), Some(EXIT_PASS));
    assert!(o.stdout.is_empty() && o.stderr.is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(meta(&csv, "verdict").as_deref(), Some("pass"));
    assert_eq!(meta(&csv, "seed").as_deref(), Some("1"));
    assert_eq!(meta(&csv, "config_sha256").map(|h| h.len()), Some(64));
}

#[test]
fn report_goes_to_stdout_without_out() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.json", AXIOMS);
    let o = run(&cfg, &[]);
    assert_eq!(o.status.code(), Some(EXIT_PASS));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("# command: axioms"));
    assert!(String::from_utf8(o.stderr).unwrap().contains("pass"));
}

#[test]
fn failing_verdict_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "b.json",
        r#"{"model":{"model":"heisenberg","n":1},"command":"barycentric","seed":3,"samples":4}"#,
    );
    assert_eq!(run(&cfg, &["--quiet"]).status.code(), Some(EXIT_FAIL));
}

#[test]
fn numerical_finding_is_reported_as_a_row() {
    let text = r#"{"model":{"model":"heisenberg","n":1},"command":"menelaos","x":[1,0,0],"y":[0,1,0],"eps":0.9,"mu":0.9,"max_iter":2}"#;
    let (_, report) = run_text(text, None).unwrap();
    assert_eq!(report.status, EXIT_FAIL);
    let csv = String::from_utf8(report.bytes).unwrap();
    assert!(csv.lines().any(|l| l == "status,error"));
    assert!(csv.lines().any(|l| l.starts_with("finding,")));
}

#[test]
fn malformed_configs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        r#"{"model":{"model":"euclidean","n":2},"command":"axioms","which":"all","seed":1,"bogus":3}"#,
        r#"{"model":{"model":"euclidean","n":0},"command":"axioms","which":"all","seed":1}"#,
        r#"{"model":{"model":"nowhere"},"command":"axioms","which":"all","seed":1}"#,
        r#"{"model":{"model":"heisenberg","n":1},"command":"menelaos","x":[1,0,0],"y":[0,1,0],"eps":2.0,"mu":0.5}"#,
        "not json",
    ];
    for (i, text) in cases.iter().enumerate() {
        let cfg = write(dir.path(), &format!("bad{i}.json"), text);
        assert_eq!(run(&cfg, &["--quiet"]).status.code(), Some(EXIT_ERROR), "{text}");
    }
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&missing, &["--quiet"]).status.code(), Some(EXIT_ERROR));
}

#[test]
fn seed_flag_overrides_the_config() {
    let (_, base) = run_text(AXIOMS, None).unwrap();
    let (_, same) = run_text(AXIOMS, Some(1)).unwrap();
    let (_, other) = run_text(AXIOMS, Some(99)).unwrap();
    let text = |r: &dilatation_lab::Report| String::from_utf8(r.bytes.clone()).unwrap();
    assert_eq!(base.bytes, same.bytes);
    assert_eq!(meta(&text(&other), "seed").as_deref(), Some("99"));
    assert_ne!(meta(&text(&base), "config_sha256"), meta(&text(&other), "config_sha256"));
}

#[test]
fn hash_ignores_formatting_of_the_config() {
    let spaced = AXIOMS.replace(',', " ,\n  ");
    let (_, a) = run_text(AXIOMS, None).unwrap();
    let (_, b) = run_text(&spaced, None).unwrap();
    assert_eq!(a.bytes, b.bytes);
}
