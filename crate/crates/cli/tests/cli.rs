use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degparity")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_tmp(name: &str, text: &str) -> String {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).to_string_lossy().into_owned()
}

#[test]
fn classify_prints_json() {
    let o = run(&["classify", "--curve", "[1,-1,0,-58,-105]", "--conductor", "2537"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rule"], "CASE_3A");
    assert_eq!(v["parity"], "undetermined");
}

#[test]
fn parity_and_hecke() {
    let o = run(&["parity", "--level", "11", "--curve", "[0,-1,1,-10,-20]"]);
    assert_eq!(stdout(&o).trim(), "odd\tTM_EQ_Z2");
    let o = run(&["hecke", "--level", "23", "--dump-structure"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("0\t2\t2\tfalse\tResidueFieldNotF2"));
    assert!(text.lines().any(|l| l == "dim 2"));
}

#[test]
fn merel_table() {
    let o = run(&["--threads", "2", "merel", "--max", "120"]);
    assert_eq!(stdout(&o), "level\tcriterion\n17\tfalse\n41\ttrue\n73\tfalse\n89\tfalse\n97\tfalse\n113\ttrue\n");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["parity", "--level", "10", "--curve", "[0,0,0]"]).status.code(), Some(2));
    assert_eq!(run(&["hecke", "--level", "15"]).status.code(), Some(2));
    assert_eq!(run(&["audit", "--allcurves", "/nonexistent", "--degphi", "/nonexistent"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn audit_exit_codes() {
    let ac = write_tmp("ac.txt", "11 a 1 [0,-1,1,-10,-20] 0 5\n37 a 1 [0,0,1,-1,0] 1 1\n");
    let good = write_tmp("dp_good.txt", "11 a 1 [0,-1,1,-10,-20] 1\n37 a 1 [0,0,1,-1,0] 2\n");
    let bad = write_tmp("dp_bad.txt", "11 a 1 [0,-1,1,-10,-20] 1\n37 a 1 [0,0,1,-1,0] 1\n");
    let o = run(&["audit", "--allcurves", &ac, "--degphi", &good]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["summary"]["audited"], 2);
    let o = run(&["audit", "--allcurves", &ac, "--degphi", &bad, "--format", "tsv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("37a1\t") && l.contains("\tdisagree\t")));
}

#[test]
fn audit_output_ignores_thread_count() {
    let ac = data("allcurves.00000-03000");
    let dp = data("degphi.00000-03000");
    let args = |k: &'static str| {
        ["--threads", k, "audit", "--allcurves", &ac, "--degphi", &dp, "--max-level", "200", "--slow"]
            .map(String::from)
    };
    let one = Command::new(env!("CARGO_BIN_EXE_degparity")).args(args("1")).output().unwrap();
    let four = Command::new(env!("CARGO_BIN_EXE_degparity")).args(args("4")).output().unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}
