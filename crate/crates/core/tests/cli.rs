use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gwrecon"))
}

fn job_file(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gwrecon-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const CP1_J: &str =
    r#"{"schema":1,"target":{"type":"projective","n":2},"pipeline":"j-function","caps":{"q_degree":2,"def_degree":0}}"#;
const ND2: &str = r#"{"schema":1,"target":{"type":"projective","n":3},"pipeline":"nd-invariants","dmax":2}"#;

#[test]
fn cp1_j_function_degree_one() {
    let p = job_file("cp1.json", CP1_J);
    let o = run(&["--job", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = doc["result"]["j"].as_array().unwrap();
    let at = |z: i64, index: u64| {
        rows.iter()
            .find(|r| r["q"][0] == 1 && r["z"] == z && r["index"] == index)
            .map(|r| r["value"].as_str().unwrap().to_string())
    };
    // Q^1 ↦ -1/z - 2p/z²
    assert_eq!(at(-1, 0).as_deref(), Some("-1/1"));
    assert_eq!(at(-2, 1).as_deref(), Some("-2/1"));
    assert_eq!(doc["schema"], 1);
}

#[test]
fn nd_table_csv_and_file_output() {
    let p = job_file("nd.json", ND2);
    let out = p.with_file_name("nd.csv");
    let o = run(&["--job", p.to_str().unwrap(), "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(out).unwrap(), "d,N_d,oracle,agree\n1,1/1,1/1,true\n2,1/1,1/1,true\n");
}

#[test]
fn validation_errors_exit_2() {
    let p = job_file("n0.json", r#"{"schema":1,"target":{"type":"projective","n":0},"pipeline":"seed"}"#);
    let o = run(&["--job", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n must be ≥ 1"));

    let bad = job_file("bad.json", "{not json");
    assert_eq!(run(&["--job", bad.to_str().unwrap()]).status.code(), Some(2));
    let wrong = job_file(
        "wrong.json",
        r#"{"schema":1,"target":{"type":"projective","n":2},"pipeline":"nd-invariants","dmax":2}"#,
    );
    assert_eq!(run(&["--job", wrong.to_str().unwrap()]).status.code(), Some(2));
    let csv = job_file("csv.json", CP1_J);
    assert_eq!(run(&["--job", csv.to_str().unwrap(), "--format", "csv"]).status.code(), Some(2));
}

#[test]
fn computation_errors_exit_3() {
    let p = job_file(
        "caps.json",
        r#"{"schema":1,"target":{"type":"projective","n":3},"pipeline":"nd-invariants","dmax":3,"caps":{"q_degree":3,"def_degree":4}}"#,
    );
    let o = run(&["--job", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("deformation degree >= 7"));
}

#[test]
fn identical_output_across_runs_and_threads() {
    let p = job_file("det.json", ND2);
    let a = run(&["--job", p.to_str().unwrap(), "--threads", "1"]);
    let b = run(&["--job", p.to_str().unwrap(), "--threads", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["--job", p.to_str().unwrap()]);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn selftest_reports_every_criterion_identically() {
    let a = run(&["--selftest", "--threads", "3"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    let text = stdout(&a);
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 10);
    assert!(text.ends_with("10/10 criteria passed\n"));
    let b = run(&["--selftest", "--threads", "1"]);
    assert_eq!(a.stdout, b.stdout);
}
