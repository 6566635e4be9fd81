use std::process::{Command, Output};

use serde_json::Value;

fn ultradiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ultradiv"))
        .args(args)
        .env_remove("ULTRADIV_GUARD")
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> (Value, i32) {
    let out = ultradiv(args);
    let code = out.status.code().expect("exit code");
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().count(),
        1,
        "one report line for {args:?}: {text}"
    );
    (serde_json::from_str(&text).expect("json report"), code)
}

#[test]
fn classify_examples() {
    let (r, code) = report(&["classify", "360"]);
    assert_eq!(code, 0);
    assert_eq!(r["outcome"], "value");
    assert_eq!(r["result"]["level"], 6);
    assert_eq!(r["result"]["shape"], serde_json::json!([3, 2, 1]));
    let (r, _) = report(&["classify", "1"]);
    assert_eq!(r["result"]["level"], 0);
    let (r, _) = report(&["classify", "210"]);
    assert_eq!(r["result"]["class"], "P^(4)");
}

#[test]
fn divides_examples() {
    for (m, n, expect) in [("6", "42", true), ("6", "10", false), ("1", "97", true)] {
        let (r, code) = report(&["divides", m, n]);
        assert_eq!(code, 0);
        assert_eq!(r["result"]["divides_up"], expect);
        assert_eq!(r["result"]["divides_down"], expect);
    }
    assert_eq!(
        ultradiv(&["divides", "6", "42", "--universe", "10"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn product_and_color() {
    let (r, code) = report(&["product", "2", "3", "--window", "100"]);
    assert_eq!((code, r["outcome"].as_str()), (0, Some("pass")));
    assert_eq!(r["result"]["product"], 6);
    let (r, _) = report(&["color", "5", "6"]);
    assert_eq!(r["result"]["color"], 1);
    let (r, _) = report(&["color", "4", "6", "7", "9"]);
    assert_eq!(r["result"]["color"], 2);
    let (r, _) = report(&["color", "--number", "6851"]);
    assert_eq!(r["result"]["class"], 2);
    assert_eq!(ultradiv(&["color", "3", "3"]).status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let (r, code) = report(&[
        "verify", "progr", "--k", "2", "--a0-max", "256", "--d-max", "32",
    ]);
    assert_eq!((code, r["outcome"].as_str()), (0, Some("pass")));
    let (r, code) = report(&["verify", "refinement", "--n", "2", "--index-bound", "20"]);
    assert_eq!((code, r["outcome"].as_str()), (0, Some("pass")));
    let (r, code) = report(&["verify", "thick-lemmas", "--samples", "50", "--seed", "1"]);
    assert_eq!((code, r["outcome"].as_str()), (0, Some("pass")));
    let (r, code) = report(&["verify", "g-disjoint", "--count", "60"]);
    assert_eq!((code, r["outcome"].as_str()), (0, Some("pass")));
    assert_eq!(ultradiv(&["verify", "unknown"]).status.code(), Some(2));
}

#[test]
fn violations_exit_one() {
    let (r, code) = report(&[
        "verify", "progr", "--k", "1", "--a0-max", "4", "--d-max", "3",
    ]);
    assert_eq!(code, 1);
    assert_eq!(r["outcome"], "fail");
    assert_eq!(r["result"]["violations"][0], serde_json::json!([3, 3]));
}

#[test]
fn pattern_commands() {
    let (r, _) = report(&["falpha", "(p,1)x2 | p:3,5,7"]);
    assert_eq!(r["result"]["set"], serde_json::json!([15, 21, 35]));
    let (r, _) = report(&["falpha", "(p,1)x2", "p:3,5,7"]);
    assert_eq!(r["result"]["size"], 3);
    let (r, code) = report(&["witness", "(p,1)x2", "(p,1)", "p:3,5,7"]);
    assert_eq!((code, r["outcome"].as_str()), (0, Some("pass")));
    assert_eq!(r["result"]["alpha_covered"], true);
    assert_eq!(r["result"]["beta_avoided"], true);
    let (r, _) = report(&["witness", "(p,1)", "(p,1)x2", "p:3,5,7"]);
    assert_eq!(r["result"]["dominated"], true);
    let (r, _) = report(&["extend", "15", "(p,1)x2", "(p,1)x3", "p:3,5,7"]);
    assert_eq!(r["result"]["extended"], 105);
    assert_eq!(
        ultradiv(&["falpha", "(p,1)x4 | p:3,5,7"]).status.code(),
        Some(2)
    );
    assert_eq!(ultradiv(&["falpha", "(p,1 | p:3"]).status.code(), Some(2));
}

#[test]
fn thick_and_guard() {
    let (r, _) = report(&[
        "thick",
        "2,3,5,7,11,13,17,19",
        "--k-max",
        "1",
        "--m-max",
        "1",
    ]);
    assert_eq!(r["result"]["thick"], true);
    let (r, _) = report(&["thick", "2", "--k-max", "2", "--m-max", "2"]);
    assert_eq!(r["result"]["thick"], false);
    let big = "2,3,5,7,11,13,17,19,23,29,31,37,41";
    assert_eq!(ultradiv(&["thick", big]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_ultradiv"))
        .args(["thick", big])
        .env("ULTRADIV_GUARD", "13,3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn constructions_commands() {
    let (r, _) = report(&["ecfun", "--count", "4", "--g", "1"]);
    let rows = r["result"].as_array().unwrap();
    assert_eq!(rows[0]["function"], "[]2^∞");
    assert_eq!(rows[3]["g"], 21);
    let (r, code) = report(&["greedy", "--candidates", ""]);
    assert_eq!(code, 0);
    assert_eq!(
        r["result"]["outcome"]["log"][0]["decision"],
        "complement_kept"
    );
    let (r, code) = report(&[
        "greedy", "--random", "6", "--k-max", "2", "--m-max", "2", "--seed", "3",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["family_thick"], true);
}

#[test]
fn reports_are_deterministic() {
    let args = [
        "greedy", "--random", "4", "--seed", "9", "--k-max", "2", "--m-max", "2",
    ];
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("elapsed_ms");
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(strip(report(&args).0), strip(report(&args).0));
    let text = String::from_utf8(ultradiv(&["classify", "12", "--format", "text"]).stdout).unwrap();
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("classify: value"), "{first}");
    assert!(text.contains("level: 3"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(ultradiv(&[]).status.code(), Some(2));
    assert_eq!(ultradiv(&["classify", "0"]).status.code(), Some(2));
    assert_eq!(ultradiv(&["classify", "x"]).status.code(), Some(2));
}
