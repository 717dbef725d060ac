use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_fsmx")
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fsmx-cli-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn fsmx(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin()).current_dir(dir).args(args).output().unwrap()
}

#[test]
fn exit_codes() {
    let dir = scratch("exit");
    // usage errors exit 2
    assert_eq!(fsmx(&dir, &["no-such-command"]).status.code(), Some(2));
    assert_eq!(fsmx(&dir, &["minimize"]).status.code(), Some(2));
    // domain errors exit 1
    assert_eq!(fsmx(&dir, &["minimize", "missing.json"]).status.code(), Some(1));
    assert_eq!(fsmx(&dir, &["gen-data", "--grammar", "9"]).status.code(), Some(2));
    // success exits 0
    assert_eq!(fsmx(&dir, &["bounds", "--eps", "0.5"]).status.code(), Some(0));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn thread_cap_must_be_a_positive_integer() {
    let dir = scratch("threads");
    let bad = Command::new(bin())
        .current_dir(&dir)
        .env("FSMX_THREADS", "zero")
        .args(["bounds", "--eps", "0.5"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let good = Command::new(bin())
        .current_dir(&dir)
        .env("FSMX_THREADS", "4")
        .args(["bounds", "--eps", "0.5"])
        .output()
        .unwrap();
    assert_eq!(good.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn equiv_reports_a_counterexample() {
    let dir = scratch("equiv");
    let accept_all = r#"{"alphabet":["0","1"],"states":1,"initial":0,"accepting":[0],
                         "delta":[[0,0]]}"#;
    let reject_all = r#"{"alphabet":["0","1"],"states":1,"initial":0,"accepting":[],
                         "delta":[[0,0]]}"#;
    std::fs::write(dir.join("a.json"), accept_all).unwrap();
    std::fs::write(dir.join("b.json"), reject_all).unwrap();
    let same = fsmx(&dir, &["equiv", "a.json", "a.json"]);
    assert_eq!(String::from_utf8_lossy(&same.stdout), "equivalent\n");
    let diff = fsmx(&dir, &["equiv", "a.json", "b.json"]);
    assert!(diff.status.success());
    assert!(String::from_utf8_lossy(&diff.stdout).starts_with("counterexample:"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn decide_sat_prints_the_verdict() {
    let dir = scratch("sat");
    // (x1) ∧ (¬x1): padded to width-3 clauses, unsatisfiable
    std::fs::write(dir.join("unsat.cnf"), "p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n").unwrap();
    std::fs::write(dir.join("sat.cnf"), "p cnf 2 1\n1 -2 2 0\n").unwrap();
    let a = fsmx(&dir, &["decide-sat", "unsat.cnf", "--eps", "1/8"]);
    assert_eq!(String::from_utf8_lossy(&a.stdout), "UNSAT\n");
    let b = fsmx(&dir, &["decide-sat", "sat.cnf", "--eps", "1/16"]);
    assert_eq!(String::from_utf8_lossy(&b.stdout), "SAT\n");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn csv_format_flattens_the_report() {
    let dir = scratch("csv");
    let out = fsmx(&dir, &["bounds", "--m", "100", "--n", "3", "--format", "csv"]);
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "generalization_bound,generalization_bound_weighted"
    );
    assert_eq!(lines.next().unwrap().split(',').count(), 2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn gen_data_honors_size_and_labels() {
    let dir = scratch("gen");
    let out = fsmx(
        &dir,
        &["gen-data", "--grammar", "5", "--size", "37", "--max-len", "8"],
    );
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 37);
    for line in lines {
        let (label, word) = line.split_once('\t').unwrap();
        assert!(label == "0" || label == "1");
        // Tomita 5: even number of 0s and of 1s
        let zeros = word.chars().filter(|&c| c == '0').count();
        let ones = word.len() - zeros;
        assert_eq!(label == "1", zeros % 2 == 0 && ones % 2 == 0);
    }
    std::fs::remove_dir_all(&dir).ok();
}
