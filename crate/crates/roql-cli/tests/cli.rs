//! End-to-end checks of the command-line driver: byte-identical reports for
//! identical configuration and seed, and the documented exit codes.

use std::process::{Command, Output};

fn roql(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roql"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn reports_are_deterministic() {
    let args = ["adversary", "--n", "4", "--runs", "20", "--seed", "9"];
    let a = roql(&args);
    let b = roql(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "same configuration and seed, same bytes");

    let args = ["learn", "--basis", "b2", "--n", "3", "--mode", "reconstruct", "--sample", "10", "--seed", "4"];
    let a = roql(&args);
    let b = roql(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn learn_trace_emits_result_line() {
    let out = roql(&[
        "learn", "--basis", "b2", "--n", "3", "--mode", "reconstruct",
        "--target", "((x1 | x2) ^ x3)", "--trace",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("membership ")));
    assert!(text.lines().any(|l| l == "RESULT XOR(OR(x1,x2),x3)"));
}

#[test]
fn si_only_mode_uses_identity_queries_alone() {
    let out = roql(&["learn", "--basis", "and-or", "--n", "4", "--mode", "si-only"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = 0;
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols[3], "true");
        assert_eq!(cols[4], "0", "membership column stays zero");
        assert_ne!(cols[5], "0", "identity column is the only active one");
        rows += 1;
    }
    assert_eq!(rows, 100);
}

#[test]
fn eq_simulated_mode_keeps_equivalence_counter_zero() {
    let out = roql(&["learn", "--basis", "b2", "--n", "3", "--mode", "eq", "--simulate"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols[9], "0", "equivalence column stays zero");
    }
}

#[test]
fn checktest_verify_exit_codes() {
    let dir = std::env::temp_dir().join("roql-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("and3.test");
    let emit = roql(&[
        "checktest", "--basis", "b2", "--n", "3",
        "--target", "(x1 & (x2 & x3))",
        "--emit", file.to_str().unwrap(),
    ]);
    assert!(emit.status.success());

    let unique = roql(&[
        "checktest", "--verify", file.to_str().unwrap(),
        "--target", "(x1 & (x2 & x3))",
    ]);
    assert_eq!(unique.status.code(), Some(0));

    let inconsistent = roql(&[
        "checktest", "--verify", file.to_str().unwrap(),
        "--target", "(x1 | (x2 | x3))",
    ]);
    assert_eq!(inconsistent.status.code(), Some(2));

    // a one-row test cannot single out a function
    std::fs::write(&file, "n=2 basis=b2\n11 1\n").unwrap();
    let ambiguous = roql(&[
        "checktest", "--verify", file.to_str().unwrap(),
        "--target", "(x1 & x2)",
    ]);
    assert_eq!(ambiguous.status.code(), Some(1));
}

#[test]
fn enumerate_counts() {
    let out = roql(&["enumerate", "--basis", "and-or", "--n", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("and-or\t3\t17\t"));
}

#[test]
fn bad_config_exits_nonzero() {
    let out = roql(&["learn", "--basis", "threshold", "--n", "3", "--mode", "reconstruct"]);
    assert_eq!(out.status.code(), Some(2));
    let out = roql(&["learn", "--basis", "b2", "--n", "3", "--mode", "reconstruct", "--target", "(x1 &"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn promise_violation_exits_three() {
    // a constant target is outside the monotone learner's promise
    let out = roql(&[
        "learn", "--basis", "b2", "--n", "3", "--mode", "si-only", "--target", "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
}
