use std::process::{Command, Output};

use selfsim_core::schreier::{import_csv, import_dot};
use selfsim_core::GraphMode;

fn selfsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selfsim"))
        .args(args)
        .env_remove("SELFSIM_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn trivial_word_exits_zero_with_verdict() {
    let out = selfsim(&["word", "is-trivial", "--expr", "[d,d^a]"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["verdict"], true);
}

#[test]
fn failed_property_exits_one() {
    let out = selfsim(&["stabilizer", "--expr", "a", "--level", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["member"], false);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(selfsim(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(selfsim(&["word", "is-trivial", "--expr", "a^"]).status.code(), Some(2));
    assert_eq!(selfsim(&["--automaton", "nope", "nucleus"]).status.code(), Some(2));
}

#[test]
fn level_cap_exits_three() {
    assert_eq!(selfsim(&["schreier", "--level", "30"]).status.code(), Some(3));
}

#[test]
fn schreier_dot_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.dot");
    let out = selfsim(&["schreier", "--level", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let summary = stdout_json(&out);
    assert_eq!(summary["vertices"], 16);
    assert_eq!(summary["edges"], 64);
    let graph = import_dot(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(graph.level, 4);
    assert_eq!(graph.edges.len(), 64);
}

#[test]
fn schreier_csv_to_stdout_with_summary_on_stderr() {
    let out = selfsim(&["--format", "csv", "schreier", "--level", "3", "--mode", "simplicial"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("source,target,label"));
    let graph = import_csv(&text, 3, 2, GraphMode::Simplicial).unwrap();
    assert!(graph.is_connected());
    let summary: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(summary["components"], 1);
}

#[test]
fn spectrum_csv_and_side_files() {
    let dir = tempfile::tempdir().unwrap();
    let spectrum = dir.path().join("spectrum.csv");
    let vectors = dir.path().join("vectors.csv");
    let histogram = dir.path().join("histogram.csv");
    let out = selfsim(&[
        "spectrum",
        "--level",
        "3",
        "--kind",
        "laplacian",
        "--vectors",
        "smallest:2",
        "--vectors-out",
        vectors.to_str().unwrap(),
        "--bins",
        "4",
        "--histogram-out",
        histogram.to_str().unwrap(),
        "--out",
        spectrum.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let summary = stdout_json(&out);
    assert_eq!(summary["dimension"], 8);
    assert_eq!(summary["within_tolerance"], true);

    let text = std::fs::read_to_string(&spectrum).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,eigenvalue,residual"));
    let values: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 8);
    assert!(values[0].abs() < 1e-10);
    assert!(values.windows(2).all(|w| w[0] <= w[1]));

    let vector_text = std::fs::read_to_string(&vectors).unwrap();
    assert_eq!(vector_text.lines().count(), 9);
    let histogram_text = std::fs::read_to_string(&histogram).unwrap();
    let total: usize = histogram_text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(total, 8);
}

#[test]
fn exports_are_deterministic() {
    let a = selfsim(&["--format", "csv", "schreier", "--level", "5"]);
    let b = selfsim(&["--threads", "1", "--format", "csv", "schreier", "--level", "5"]);
    assert_eq!(a.stdout, b.stdout);
    let a = selfsim(&["spectrum", "--level", "4"]);
    let b = selfsim(&["spectrum", "--level", "4"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn automaton_file_is_loaded() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("odometer.txt");
    std::fs::write(
        &path,
        "alphabet: 2\nstate e: 0 -> 0 / e ; 1 -> 1 / e\nstate a: 0 -> 1 / e ; 1 -> 0 / a\n",
    )
    .unwrap();
    let out = selfsim(&["--automaton", path.to_str().unwrap(), "check", "activity"]);
    assert_eq!(out.status.code(), Some(0));
    let out = selfsim(&["--automaton", path.to_str().unwrap(), "word", "apply", "--expr", "a", "--vertex", "11"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("00"));
}

#[test]
fn schur_probe_accepts_negative_shift() {
    let out = selfsim(&["schur-probe", "--level", "3", "--gamma", "-0.25"]);
    assert_ne!(out.status.code(), Some(2));
    let summary = stdout_json(&out);
    assert_eq!(summary["gamma"], -0.25);
    assert!(summary["blocks"].as_array().unwrap().iter().any(|b| b["singular"] == true));
}
