use std::path::Path;
use std::process::{Command, Output};

const REFERENCE_RATIOS: &str = "7.14,3.77,0.65,12.73,0.15,2.98,1.18";

fn wtw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wtw"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn help_succeeds_for_every_subcommand() {
    for sub in [
        vec!["--help"],
        vec!["tabulate", "--help"],
        vec!["test", "--help"],
        vec!["simulate", "--help"],
        vec!["simulate", "gue", "--help"],
        vec!["simulate", "wishart", "--help"],
        vec!["simulate", "panel", "--help"],
        vec!["centering", "--help"],
        vec!["verify", "--help"],
    ] {
        let out = wtw(&sub);
        assert_eq!(out.status.code(), Some(0), "{sub:?}");
        assert!(stdout(&out).contains("Usage"), "{sub:?}");
    }
}

#[test]
fn usage_errors_exit_with_code_two() {
    assert_eq!(wtw(&["tabulate", "--reps", "200"]).status.code(), Some(2));
    assert_eq!(wtw(&["verify", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(wtw(&["test", "--kmax", "7"]).status.code(), Some(2));
    assert_eq!(
        wtw(&["centering", "--n", "5", "--p", "3", "--ell", "1,2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn runtime_errors_exit_with_code_one() {
    let out = wtw(&["test", "--ratios", REFERENCE_RATIOS, "--kmax", "7", "--level", "0.42"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn reference_ratios_give_the_reference_confidence_set() {
    let out = wtw(&["test", "--ratios", REFERENCE_RATIOS, "--kmax", "7"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("members: [4, 5, 6, 7]"), "{}", stdout(&out));

    let out = wtw(&[
        "test",
        "--ratios",
        REFERENCE_RATIOS,
        "--kmax",
        "7",
        "--exclude-kmax",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["members"], serde_json::json!([4, 5, 6]));

    let out = wtw(&[
        "test",
        "--ratios",
        REFERENCE_RATIOS,
        "--kmax",
        "7",
        "--k0",
        "4",
        "--format",
        "json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["statistic"], serde_json::json!(2.98));
    assert_eq!(doc["reject"], serde_json::json!(false));
}

#[test]
fn simulated_panel_round_trips_through_the_test() {
    let dir = tempfile::tempdir().unwrap();
    let panel = dir.path().join("panel.csv");
    let scree = dir.path().join("scree.csv");
    let sim = wtw(&[
        "simulate",
        "panel",
        "--p",
        "60",
        "--n-half",
        "40",
        "--k",
        "2",
        "--seed",
        "3",
        "--out",
        path_str(&panel),
    ]);
    assert!(sim.status.success());

    let out = wtw(&[
        "test",
        "--panel",
        path_str(&panel),
        "--kmax",
        "5",
        "--exclude-kmax",
        "--format",
        "json",
        "--scree-out",
        path_str(&scree),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["members"][0], serde_json::json!(2));
    let scree = std::fs::read_to_string(scree).unwrap();
    assert!(scree.starts_with("index,eigenvalue\n1,"));
    assert_eq!(scree.lines().count(), 61);
}

#[test]
fn tabulation_is_independent_of_thread_count_and_feeds_the_test() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "tabulate", "--m-max", "3", "--gue-n", "40", "--reps", "300", "--seed", "9",
    ];
    let one = wtw(&[&args[..], &["--threads", "1"]].concat());
    let two = wtw(&[&args[..], &["--threads", "3"]].concat());
    assert!(one.status.success() && two.status.success());
    assert_eq!(one.stdout, two.stdout);

    let table = dir.path().join("table.json");
    std::fs::write(&table, &one.stdout).unwrap();
    let out = wtw(&[
        "test",
        "--ratios",
        "9.0,1.0,1.0",
        "--kmax",
        "3",
        "--table",
        path_str(&table),
        "--level",
        "0.9",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_reports_and_injected_failures_fail() {
    let out = wtw(&["verify", "--suite", "n1-oracle", "--suite", "airy"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("PASS n1-oracle"));
    assert!(text.contains("summary: 2 passed, 0 failed"));

    let out = wtw(&["verify", "--suite", "n1-oracle", "--inject-failure", "n1-oracle"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL n1-oracle"));
}

#[test]
fn centering_matches_white_closed_form() {
    let out = wtw(&["centering", "--n", "100", "--p", "200"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let mu = doc["params"]["mu"].as_f64().unwrap();
    assert!((mu - (1.0 + 2f64.sqrt()).powi(2)).abs() < 1e-12);
}

#[test]
fn simulation_is_reproducible() {
    let a = wtw(&[
        "simulate",
        "wishart",
        "--n",
        "2",
        "--ell",
        "1,0.7,0.4",
        "--reps",
        "5",
        "--seed",
        "4",
    ]);
    let b = wtw(&[
        "simulate",
        "wishart",
        "--n",
        "2",
        "--ell",
        "1,0.7,0.4",
        "--reps",
        "5",
        "--seed",
        "4",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("rep,lambda1,lambda2,lambda3\n"));
}
