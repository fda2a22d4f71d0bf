use std::path::Path;
use std::process::{Command, Output};

use invmap_cli::ExperimentReport;

fn invmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invmap")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn build(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let path_str = path.to_str().unwrap().to_string();
    let mut all = vec!["cfi", "build"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["-o", &path_str]);
    assert_eq!(invmap(&all).status.code(), Some(0));
    path_str
}

#[test]
fn iso_verdicts_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let a = build(dir.path(), "a.cfi", &["--graph", "K4", "--p", "2"]);
    let b = build(dir.path(), "b.cfi", &["--graph", "K4", "--p", "2", "--load", "0=1"]);
    let c = build(dir.path(), "c.cfi", &["--graph", "K4", "--p", "2", "--load", "2=1"]);
    let o = invmap(&["cfi", "iso", &a, &b]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("isomorphic: false"));
    let o = invmap(&["cfi", "iso", &b, &c]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("witness:\ntwist 12 mod 2"));
}

#[test]
fn twist_file_shifts_loads() {
    let dir = tempfile::tempdir().unwrap();
    let a = build(dir.path(), "a.cfi", &["--graph", "K4", "--p", "3"]);
    let twist = dir.path().join("t.twist");
    std::fs::write(&twist, "twist 12 mod 3\n0 1 1\n1 0 2\n").unwrap();
    let o = invmap(&["cfi", "twist", &a, twist.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("load 0 1\nload 1 2\n"));
}

#[test]
fn graph_encoding_feeds_wl() {
    let dir = tempfile::tempdir().unwrap();
    let a = build(dir.path(), "a.cfi", &["--graph", "K4", "--p", "2"]);
    let b = build(dir.path(), "b.cfi", &["--graph", "K4", "--p", "2", "--load", "3=1"]);
    let ga = dir.path().join("a.graph");
    let gb = dir.path().join("b.graph");
    for (src, dst) in [(&a, &ga), (&b, &gb)] {
        let o = invmap(&["cfi", "graph-encode", src, "-o", dst.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert!(std::fs::read_to_string(&ga).unwrap().starts_with("graph "));
    let o = invmap(&["wl", "compare", ga.to_str().unwrap(), gb.to_str().unwrap(), "-k", "1"]);
    assert_eq!(stdout(&o), "wl-equivalent: true\n");
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn refinement_reports() {
    let dir = tempfile::tempdir().unwrap();
    let a = build(dir.path(), "a.cfi", &["--graph", "K4", "--p", "2"]);
    let o = invmap(&["wl", "run", &a, "-k", "1"]);
    assert!(stdout(&o).starts_with("class 0 size "));
    let o = invmap(&["im", "run", &a, "-k", "2", "-Q", "2", "--orbits"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("im k=2 Q={2}"));
    assert!(out.contains("split-orbits 0"));
}

#[test]
fn experiment_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("maschke.report");
    let o = invmap(&["experiment", "maschke", "--max-order", "12", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r: ExperimentReport = std::fs::read_to_string(&path).unwrap().parse().unwrap();
    assert_eq!(r.experiment, "maschke");
    assert_eq!(r.verdict_value("disagreements"), Some("0"));
}

#[test]
fn errors_exit_with_two() {
    let o = invmap(&["cfi", "iso", "/nonexistent/a", "/nonexistent/b"]);
    assert_eq!(o.status.code(), Some(2));
    let o = invmap(&["experiment", "separation", "--p", "2", "--q", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = invmap(&["cfi", "build", "--graph", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}
