use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropical-lp"))
        .args(args)
        .output()
        .unwrap()
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let value = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), value)
}

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

#[test]
fn solve_game_on_worked_example() {
    let (code, v) = run_json(&["solve-game", &path("example22.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["winning"], serde_json::json!([4, 5]));
    let cert = v["certificates"]["4"].as_array().unwrap();
    assert!(cert[..3].iter().all(Value::is_null));
}

#[test]
fn compare_agrees_on_worked_example() {
    let (code, v) = run_json(&["compare", &path("example22.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["all_agree"], Value::Bool(true));
    assert_eq!(v["states"].as_array().unwrap().len(), 5);
}

#[test]
fn oracle_reports_values() {
    let (code, v) = run_json(&["oracle", &path("example22.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["winning"], serde_json::json!([4, 5]));
    assert_eq!(v["chi"][3], Value::String("1/1".into()));
}

#[test]
fn solve_lp_examples() {
    let (code, v) = run_json(&["solve-lp", &path("example31.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "feasible");
    assert_eq!(v["point"], serde_json::json!([null, null]));
    let (_, v) = run_json(&["solve-lp", &path("example31_lower.json")]);
    assert_eq!(v["status"], "infeasible");
    let (_, v) = run_json(&["solve-lp", &path("box.json")]);
    assert_eq!(v["point"][0], "1/1");
    assert_eq!(v["value"], "1/1");
}

#[test]
fn trace_goes_to_stderr() {
    let out = run(&["--trace", "solve-lp", &path("example31.json")]);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.lines().any(|l| l.starts_with("phase1 basis=")));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "feasible");
}

#[test]
fn text_format() {
    let out = run(&["--format", "text", "solve-game", &path("example22.json")]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("winning states: [4, 5]"));
}

#[test]
fn permanent_and_genericity() {
    let (_, v) = run_json(&["permanent", &path("matrix.json")]);
    assert_eq!(v["value"], "3/1");
    assert_eq!(v["sign"], 1);
    assert_eq!(v["permutation"], serde_json::json!([1, 2]));
    let (_, v) = run_json(&["permanent", &path("tied_matrix.json")]);
    assert_eq!(v["unique"], false);
    let (_, v) = run_json(&["check-generic", &path("matrix.json")]);
    assert_eq!(v["generic"], true);
    let (_, v) = run_json(&["check-generic", &path("tied_matrix.json")]);
    assert_eq!(v["generic"], false);
    assert_eq!(v["witness"]["rows"], serde_json::json!([1, 2]));
    let (code, _) = run_json(&[
        "check-generic",
        &path("matrix.json"),
        "--max-exhaustive",
        "1",
    ]);
    assert_eq!(code, 2);
}

#[test]
fn generated_games_round_trip_through_solver() {
    let out = run(&["generate-game", "--seed", "7", "--n", "3", "--m", "2"]);
    assert!(out.status.success());
    let dir = std::env::temp_dir().join(format!("tropical-lp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("game.json");
    std::fs::write(&file, &out.stdout).unwrap();
    let again = run(&["generate-game", "--seed", "7", "--n", "3", "--m", "2"]);
    assert_eq!(out.stdout, again.stdout);
    let (code, v) = run_json(&["compare", &file.to_string_lossy()]);
    assert_eq!(code, 0);
    assert_eq!(v["all_agree"], Value::Bool(true));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(
        run(&["--rule", "dantzig", "solve-game", &path("example22.json")])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["solve-lp", "/nonexistent/file.json"]).status.code(),
        Some(2)
    );
    // a game file is not a program
    assert_eq!(
        run(&["solve-lp", &path("example22.json")]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["generate-game", "--n", "0"]).status.code(), Some(2));
}
