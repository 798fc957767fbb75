use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn jetsphere(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetsphere"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn without_timestamp(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timestamp");
    v
}

#[test]
fn group_check_passes_and_reports_deviations() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let out = jetsphere(&[
        "group-check",
        "--n",
        "1",
        "--k",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&path);
    assert_eq!(r["pass"], true);
    assert!(r["result"]["group"]["associativity"].as_f64().unwrap() < 1e-10);
    assert_eq!(r["config"]["trials"], 1000);
    assert_eq!(r["config"]["seed"], 0);
    assert!(r["timestamp"].is_string());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        code(&jetsphere(&["group-check", "--n", "2", "--k", "9"])),
        2
    );
    assert_eq!(
        code(&jetsphere(&[
            "group-check",
            "--n",
            "1",
            "--k",
            "1",
            "--trials",
            "0"
        ])),
        2
    );
    assert_eq!(code(&jetsphere(&["group-check", "--n", "0"])), 2);
    assert_eq!(code(&jetsphere(&["distortion", "--map", "torus"])), 2);
    assert_eq!(code(&jetsphere(&["scaling", "--M", "1"])), 2);
    assert_eq!(code(&jetsphere(&["obstruction", "--n", "1"])), 2);
    assert_eq!(code(&jetsphere(&["no-such-command"])), 2);
}

#[test]
fn failed_assertion_exits_one_with_a_record() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("o.json");
    let out = jetsphere(&["obstruction", "--res", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let r = report(&path);
    assert_eq!(r["pass"], false);
    assert_eq!(r["result"]["certified"], false);
}

#[test]
fn distortion_report_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.json");
    let mut texts = Vec::new();
    for _ in 0..2 {
        let out = jetsphere(&[
            "distortion",
            "--map",
            "circle",
            "--k",
            "1",
            "--pairs",
            "20000",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        texts.push(std::fs::read_to_string(&path).unwrap());
    }
    let (text_a, text_b) = (&texts[0], &texts[1]);
    let (ra, rb): (Value, Value) = (
        serde_json::from_str(text_a).unwrap(),
        serde_json::from_str(text_b).unwrap(),
    );
    assert_eq!(without_timestamp(ra.clone()), without_timestamp(rb));

    let strip = |t: &str| {
        t.lines()
            .filter(|l| !l.contains("\"timestamp\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(text_a), strip(text_b));
    assert!(ra["result"]["report"]["min_ratio"].as_f64().unwrap() > 0.0);
}

#[test]
fn lambda_distortion_respects_bounds() {
    let out = jetsphere(&[
        "distortion",
        "--map",
        "lambda",
        "--n",
        "2",
        "--pairs",
        "20000",
    ]);
    assert_eq!(code(&out), 0);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    let min = r["result"]["report"]["min_ratio"].as_f64().unwrap();
    assert!(min >= 1.0 / 9.0 - 1e-9);
}

#[test]
fn floats_use_seventeen_digits() {
    let out = jetsphere(&["comass", "--trials", "50"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("\"extremal\": 1.0000000000000000e0"),
        "{text}"
    );
}

#[test]
fn scaling_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let out = jetsphere(&[
        "scaling",
        "--n",
        "2",
        "--k",
        "1",
        "--M",
        "1,2,4,8",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("M,integral,predicted,relative_error,lower_bound")
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    let slope = (rows[3][1] / rows[0][1]).ln() / 8f64.ln();
    assert!((slope - 4.0).abs() < 0.01, "{slope}");
}

#[test]
fn stokes_smooth_suite_passes() {
    let out = jetsphere(&["stokes", "--n", "2", "--suite", "smooth"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["result"]["cases"].as_array().unwrap().len(), 20);
}

#[test]
fn jet_check_passes() {
    let out = jetsphere(&["jet-check", "--n", "2", "--k", "3", "--trials", "50"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}
