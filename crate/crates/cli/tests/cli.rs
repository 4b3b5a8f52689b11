use std::process::{Command, Output};

use serde_json::Value;

fn wn2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wn2")).args(args).env("WN2_THREADS", "2").output().expect("runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn determinant_self_ope_is_regular() {
    let o = wn2(&["ope", "--n", "2", "--left", "D", "--right", "D"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "D x D: regular\n");
    let o = wn2(&["--json", "ope", "--n", "2", "--left", "D", "--right", "D"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pair"], serde_json::json!(["D", "D"]));
    assert_eq!(v["poles"], serde_json::json!({}));
}

#[test]
fn ope_json_file_uses_exact_strings() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let o = wn2(&["ope", "--n", "2", "--left", "1/2*D", "--right", "D'", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["pair"], serde_json::json!(["1/2*D", "D'"]));
    assert_eq!(v["poles"]["2"], "1");
    assert_eq!(v["poles"]["1"], "1/2*C[1]");
}

#[test]
fn zhu_and_classify_for_sl2() {
    let o = wn2(&["zhu", "--n", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("P = 1/2*c2 - 1/4*c1^2 - 3/2*c1 - 2"), "{text}");
    assert!(text.contains("Q = 1/2*c2 - 1/4*c1^2 - 1/2*c1"), "{text}");
    let o = wn2(&["--json", "classify", "--n", "2", "--dim", "3"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["solved"]["a"], "0");
    assert_eq!(v["solved"]["l2"], "4");
}

#[test]
fn oracle_reports_are_reproducible() {
    let args = ["--json", "oracle", "--n", "2", "--samples", "20", "--seed", "11"];
    let one = wn2(&args);
    let two = wn2(&args);
    assert!(one.status.success());
    assert_eq!(one.stdout, two.stdout);
    let v: Value = serde_json::from_str(&stdout(&one)).unwrap();
    assert_eq!(v["seed"], 11);
    assert_eq!(v["pass"], true);
}

#[test]
fn exit_codes() {
    // No products checked is a failed check, not a pass.
    assert_eq!(wn2(&["oracle", "--n", "2", "--samples", "0"]).status.code(), Some(1));
    assert_eq!(wn2(&["ope", "--n", "2", "--left", "Q[1]", "--right", "D"]).status.code(), Some(2));
    assert_eq!(wn2(&["zhu", "--n", "7"]).status.code(), Some(2));
    assert_eq!(wn2(&["relations", "--n", "2"]).status.code(), Some(0));
}

#[test]
fn tables_and_verify_for_sl2() {
    let o = wn2(&["tables", "--n", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("golden: 6 entries checked, 0 mismatches"));
    let o = wn2(&["--json", "verify", "--n", "2", "--full-w"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
}
