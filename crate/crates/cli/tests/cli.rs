use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use torimmp::instances::{f1_pair, pl_flip_pair, PL_FLIP_S};
use torimmp::io::{write_divisor, write_pair, TraceRecord};
use torimmp::{Scalar, TDivisor};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torimmp")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn validate_p2() {
    let o = run(&["validate", p(&data("p2.json"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("smooth true simplicial true complete true"));
}

#[test]
fn validate_rejects_bad_input() {
    let o = run(&["validate", p(&data("overlapping.json"))]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["validate", p(&data("mixed_roots.json"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse"));
    let o = run(&["validate", "/nonexistent/fan.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scale_f1_anticanonical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.json");
    let o = run(&["scale", p(&data("f1.json")), "--H", p(&data("minus_k.json")), "--trace", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert_eq!(text.lines().last(), Some("outcome MoriFiberSpace"));
    let rec = TraceRecord::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rec.steps.len(), 1);
    assert_eq!(rec.outcome, "MoriFiberSpace");
    assert_eq!(TraceRecord::parse(&rec.to_json()).unwrap(), rec);
}

#[test]
fn mori_divisorial_first_on_f1() {
    let o = run(&["mori", p(&data("f1.json")), "--strategy", "divisorial-first"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().contains("divisorial"));
    assert!(text.ends_with("outcome MoriFiberSpace\n"));
}

#[test]
fn mfs_p2_line() {
    let o = run(&["mfs", p(&data("p2.json")), "--H", p(&data("p2_line.json"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("c = 3\n"));
}

#[test]
fn bend_rejects_non_big() {
    let o = run(&["bend", p(&data("f1.json"))]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not big"));
}

#[test]
fn algebra_saturate_half_floor() {
    let o = run(&["algebra", "saturate", p(&data("half_floor.json"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "saturated; d = 1/2; FG\n");
}

#[test]
fn algebra_rationality() {
    let o = run(&["algebra", "rationality", p(&data("half_floor.json"))]);
    assert_eq!(stdout(&o), "rational; d = 1/2; j = 2\n");
    let o = run(&["algebra", "rationality", p(&data("root_two_half.json"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("irrational; j = 7;"));
}

#[test]
fn algebra_truncate() {
    let o = run(&["algebra", "truncate", p(&data("three_five.json")), "--k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("agree true"));
}

#[test]
fn algebra_diophantine() {
    let dir = tempfile::tempdir().unwrap();
    let fan = dir.path().join("f1.json");
    let d = dir.path().join("d.json");
    std::fs::write(&fan, write_pair(&f1_pair())).unwrap();
    let mut div = TDivisor::zero(4);
    div.set(0, Scalar::sqrt(2) * Scalar::frac(1, 2));
    std::fs::write(&d, write_divisor(&div)).unwrap();
    let o = run(&["algebra", "diophantine", p(&fan), "--divisor", p(&d), "--eps", "1/10"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("j = "));
    let o = run(&["algebra", "diophantine", p(&fan), "--divisor", p(&data("minus_k.json")), "--eps", "1/10"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn algebra_restricted() {
    let dir = tempfile::tempdir().unwrap();
    let pair = dir.path().join("pl.json");
    std::fs::write(&pair, write_pair(&pl_flip_pair().unwrap())).unwrap();
    let s = PL_FLIP_S.to_string();
    let o = run(&["algebra", "restricted", p(&pair), "--s", &s, "--caps", "degree=4"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("restricted algebra FG"));
    let o = run(&["algebra", "restricted", p(&pair), "--s", "0"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn suite_runs_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = |out: &Path| run(&["suite", "--seed", "1", "--count", "10", "--dim", "2", "--trace", p(out)]);
    let (oa, ob) = (args(&a), args(&b));
    assert_eq!(oa.status.code(), Some(0));
    assert!(stdout(&oa).contains(", 0 failed"));
    assert_eq!(oa.stdout, ob.stdout);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn suite_edge_cases() {
    let o = run(&["suite", "--count", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0 checks, 0 failed\n");
    let o = run(&["suite", "--dim", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_caps() {
    let o = run(&["mori", p(&data("f1.json")), "--caps", "steps=0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["mori", p(&data("f1.json")), "--strategy", "divisorial-first", "--caps", "steps=1"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("Aborted(StepCap)"));
}
