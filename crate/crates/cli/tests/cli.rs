use std::process::{Command, Output};

use biquad::optimize::OptimizationResult;
use biquad::state::StateReport;
use biquad::tilted::{Region, TiltedReport};

const CHSH: &str = r#"{"terms":[
    {"coeff":1,"alice":"u","bob":"u"},
    {"coeff":1,"alice":"u","bob":"v"},
    {"coeff":1,"alice":"v","bob":"u"},
    {"coeff":-1,"alice":"v","bob":"v"}]}"#;

fn biquad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biquad"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn tilted_classic_point() {
    let text = stdout(&biquad(&["tilted", "--alpha", "1", "--beta", "0"]));
    let report: TiltedReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.region, Region::Quantum);
    assert!((report.value - 8f64.sqrt()).abs() < 1e-15);
    assert_eq!(report.t_star, Some(0.0));
    assert!(text.contains("\"value\":2.8284271247461903"));
}

#[test]
fn tilted_accepts_negative_parameters_and_omits_state_outside_quantum_region() {
    let text = stdout(&biquad(&["tilted", "--alpha", "-2", "--beta", "0.8"]));
    let report: TiltedReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.region, Region::LocalLa);
    assert!((report.value - 5.6).abs() < 1e-12);
    assert!(!text.contains("moments"));
}

#[test]
fn tilted_requires_both_parameters() {
    let out = biquad(&["tilted", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_polynomial_has_value_zero() {
    let text = stdout(&biquad(&[
        "value",
        "--poly",
        r#"{"terms":[]}"#,
        "--grid",
        "11",
    ]));
    let result: OptimizationResult = serde_json::from_str(&text).unwrap();
    assert_eq!(result.value, 0.0);
    assert!(result.grid.is_empty());
}

#[test]
fn value_round_trips_and_is_deterministic() {
    let args = ["value", "--poly", CHSH, "--grid", "21", "--refine", "4"];
    let first = stdout(&biquad(&args));
    assert_eq!(first, stdout(&biquad(&args)));
    let result: OptimizationResult = serde_json::from_str(&first).unwrap();
    assert!((result.value - 8f64.sqrt()).abs() < 1e-9);
    assert_eq!(result.best_points.len(), 1);
    assert_eq!(result.refinement_depth, 4);

    let with_grid = stdout(&biquad(&[&args[..], &["--with-grid"]].concat()));
    let result: OptimizationResult = serde_json::from_str(&with_grid).unwrap();
    assert_eq!(result.grid.len(), 21 * 21);
}

#[test]
fn surface_csv_has_one_row_per_grid_point() {
    let text = stdout(&biquad(&["surface", "--grid", "11", "--poly", CHSH]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,t,norm"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 121);
    let best = rows.iter().max_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
    assert_eq!((best[0], best[1]), (0.0, 0.0));
}

#[test]
fn state_at_best_point_and_override() {
    let text = stdout(&biquad(&["state", "--poly", CHSH, "--grid", "21"]));
    let report: StateReport = serde_json::from_str(&text).unwrap();
    let h = 0.5f64.sqrt();
    assert!((report.a - h).abs() < 1e-8 && (report.d - h).abs() < 1e-8);
    assert!(!report.degenerate);
    // Words of length ≤ 2 per side: 7 × 7 pairs.
    assert_eq!(report.moments.len(), 49);

    let text = stdout(&biquad(&[
        "state",
        "--poly",
        CHSH,
        "--at",
        "-0.5,0.25",
        "--max-len",
        "1",
    ]));
    let report: StateReport = serde_json::from_str(&text).unwrap();
    assert_eq!((report.point.s, report.point.t), (-0.5, 0.25));
    assert_eq!(report.moments.len(), 9);
}

#[test]
fn convert_reports_shift() {
    let text = stdout(&biquad(&["convert", "--poly", CHSH]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["shift"], 4.0);
    assert_eq!(v["terms"].as_array().unwrap().len(), 5);
}

#[test]
fn oracle_is_seeded() {
    let args = ["oracle", "--poly", CHSH, "--samples", "3000", "--seed", "7"];
    let first = stdout(&biquad(&args));
    assert_eq!(first, stdout(&biquad(&args)));
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    let achieved = v["achieved"].as_f64().unwrap();
    assert!(achieved <= 8f64.sqrt() + 1e-12 && achieved > 2.7);
    assert_eq!(v["angles"]["bob"].as_array().unwrap().len(), 2);
}

#[test]
fn thread_count_does_not_change_output() {
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_biquad"))
            .args(["oracle", "--poly", CHSH, "--samples", "2000"])
            .env("BIQUAD_THREADS", threads)
            .output()
            .unwrap();
        stdout(&out)
    };
    assert_eq!(run("1"), run("3"));

    let out = Command::new(env!("CARGO_BIN_EXE_biquad"))
        .args(["tilted", "--alpha", "1", "--beta", "0"])
        .env("BIQUAD_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_file_and_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("chsh.json");
    std::fs::write(&input, CHSH).unwrap();
    let output = dir.path().join("game.json");
    let out = biquad(&[
        "convert",
        "-i",
        input.to_str().unwrap(),
        "-o",
        output.to_str().unwrap(),
    ]);
    assert!(stdout(&out).is_empty());
    let written = std::fs::read_to_string(&output).unwrap();
    assert!(written.starts_with("{\"shift\":4,"));
}

#[test]
fn malformed_json_exits_2_with_position() {
    let out = biquad(&["value", "--poly", "{\"terms\":\n  [oops]}"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("line 2"), "{err}");
    assert!(err.contains("column"), "{err}");
}

#[test]
fn bad_letter_exits_2() {
    let out = biquad(&[
        "convert",
        "--poly",
        r#"{"terms":[{"coeff":1,"alice":"uw","bob":""}]}"#,
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("'w'"));
}

#[test]
fn missing_input_file_exits_2() {
    let out = biquad(&["value", "-i", "/nonexistent/poly.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn both_input_sources_is_a_usage_error() {
    let out = biquad(&["value", "-i", "x.json", "--poly", "{}"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn precondition_failures_exit_3_naming_the_contract() {
    let out = biquad(&[
        "state",
        "--poly",
        r#"{"terms":[{"coeff":1,"alice":"uv","bob":""}]}"#,
        "--at",
        "0.5,0",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("hermitian-input"));

    let out = biquad(&["state", "--poly", CHSH, "--at", "1.5,0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("anticommutation-domain"));
}

#[test]
fn invalid_search_config_exits_2() {
    let out = biquad(&["value", "--poly", CHSH, "--grid", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("config"));
}
