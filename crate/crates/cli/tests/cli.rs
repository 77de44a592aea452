//! End-to-end checks of the command-line surface: exit codes, JSON report
//! shape, file round-trips, and seed reproducibility.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_embezzlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(output: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&output.stdout);
    // sweeps print CSV before the report; the report starts at the first '{'
    let start = text.find('{').unwrap_or_else(|| panic!("no JSON in: {text}"));
    serde_json::from_str(&text[start..]).expect("valid report JSON")
}

#[test]
fn chsh_value_report() {
    let out = run(&["game", "value", "--name", "chsh", "--strategy", "optimal"]);
    assert!(out.status.success());
    let doc = report(&out);
    let value = doc["outputs"]["value"].as_f64().unwrap();
    assert!((value - 0.8535533905932737).abs() < 1e-9);
}

#[test]
fn chsh_classical_report() {
    let out = run(&["game", "classical", "--name", "chsh"]);
    assert!(out.status.success());
    let doc = report(&out);
    assert_eq!(doc["outputs"]["classical_value"].as_f64().unwrap(), 0.75);
}

#[test]
fn embezzle_verify_passes_and_sets_exit_code() {
    let out = run(&["embezzle", "verify", "--m", "1", "--epsilon", "0.5", "--state", "epr"]);
    assert!(out.status.success());
    let doc = report(&out);
    assert_eq!(doc["outputs"]["pass"].as_bool(), Some(true));
    assert_eq!(doc["outputs"]["n"].as_u64(), Some(2));
}

#[test]
fn transform_reports_the_bound() {
    let out = run(&["transform", "--game", "chsh", "--epsilon", "0.25"]);
    assert!(out.status.success());
    let doc = report(&out);
    assert_eq!(doc["outputs"]["pass"].as_bool(), Some(true));
    let bound = doc["outputs"]["bound"].as_f64().unwrap();
    assert!((bound - 0.14644660940672616).abs() < 1e-9);
}

#[test]
fn synth_finds_the_menu_gate() {
    let out = run(&["synth", "--target", "ih", "--d", "2", "--eps", "0.001", "--max-slots", "3"]);
    assert!(out.status.success());
    let doc = report(&out);
    assert_eq!(doc["outputs"]["program"].as_str(), Some("10"));
}

#[test]
fn game_files_load_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chsh.json");
    std::fs::write(
        &path,
        r#"{
            "rounds": 1,
            "S": ["0","1"], "T": ["0","1"], "A": ["0","1"], "B": ["0","1"],
            "pi": "uniform",
            "predicate": { "expr": "(a1 ^ b1) == (s1 & t1)" }
        }"#,
    )
    .unwrap();
    let out = run(&["game", "classical", "--file", path.to_str().unwrap()]);
    assert!(out.status.success());
    let doc = report(&out);
    assert_eq!(doc["outputs"]["classical_value"].as_f64().unwrap(), 0.75);
}

#[test]
fn sweep_emits_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = run(&[
        "sweep",
        "--game",
        "chsh",
        "--epsilons",
        "0.5,0.25",
        "--csv-out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "epsilon,n,fidelity,omega,omega_prime,bound,gap,status");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].ends_with("pass"));
}

#[test]
fn optimize_is_reproducible_for_a_fixed_seed() {
    let args = ["optimize", "--game", "chsh", "--m", "1", "--restarts", "3", "--seed", "9"];
    let first = report(&run(&args));
    let second = report(&run(&args));
    assert_eq!(
        first["outputs"]["best_value"].as_f64().unwrap().to_bits(),
        second["outputs"]["best_value"].as_f64().unwrap().to_bits()
    );
}

#[test]
fn report_writes_to_the_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "--out",
        path.to_str().unwrap(),
        "game",
        "value",
        "--name",
        "chsh",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(doc["timings"]["total_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn parse_errors_exit_with_two() {
    let out = run(&["game", "value", "--bogus-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_verification_exits_with_one() {
    // an unreachable synthesis budget fails and exits 1
    let out = run(&["synth", "--target", "ry:0.7", "--d", "2", "--eps", "0.000001", "--max-slots", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = report(&out);
    assert_eq!(doc["outputs"]["found"].as_bool(), Some(false));
}
