use std::fs;
use std::path::Path;

use indefinite_sl::cli::main_with_args;
use serde_json::Value;

fn run_cli(dir: &Path, cmd: &str, config: &str, extra: &[&str]) -> i32 {
    let cfg = dir.join("config.json");
    fs::write(&cfg, config).unwrap();
    let mut args = vec!["indefinite-sl", cmd, "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    main_with_args(args)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn free_m_eval_at_i() {
    let d = tempfile::tempdir().unwrap();
    let code = run_cli(d.path(), "m-eval", r#"{"problem": {"type": "free"}, "m_eval": {"lambdas": [[0, 1]]}}"#, &[]);
    assert_eq!(code, 0);
    let rows = csv_rows(&d.path().join("m_eval.csv"));
    assert_eq!(rows[0], ["re_lambda", "im_lambda", "re_m_plus", "im_m_plus", "re_m_minus", "im_m_minus"]);
    let v: Vec<f64> = rows[1].iter().map(|s| s.parse().unwrap()).collect();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((v[2] - h).abs() < 1e-10 && (v[3] - h).abs() < 1e-10, "{v:?}");
    let side = json(&d.path().join("m_eval.json"));
    assert_eq!(side["problem_hash"].as_str().unwrap().len(), 64);
    assert!(side["tolerances"].is_object());
    assert!(side["branch_anchors"].is_object() || side["branch_anchors"].is_array());
}

#[test]
fn numeric_m_eval_matches_free() {
    let d = tempfile::tempdir().unwrap();
    let cfg = r#"{"problem": {"type": "coefficients", "q": {"segments": []}}, "m_eval": {"lambdas": [[0, 1], [-1, 0.5]]}}"#;
    assert_eq!(run_cli(d.path(), "m-eval", cfg, &[]), 0);
    let rows = csv_rows(&d.path().join("m_eval.csv"));
    let v: Vec<f64> = rows[1].iter().map(|s| s.parse().unwrap()).collect();
    assert!((v[2] - v[3]).abs() < 1e-8);
    let side = json(&d.path().join("m_eval.json"));
    assert!(side["truncation_radii"]["per_lambda"][0]["plus"].as_f64().unwrap() > 0.0);
}

#[test]
fn config_errors_exit_two() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run_cli(d.path(), "m-eval", r#"{"problem": {"type": "power_weight", "alpha": -1.5}}"#, &[]), 2);
    assert_eq!(run_cli(d.path(), "m-eval", r#"{"problem": {"type": "free"}, "surprise": true}"#, &[]), 2);
    assert_eq!(run_cli(d.path(), "m-eval", r#"{"command": "classify", "problem": {"type": "free"}}"#, &[]), 2);
    assert_eq!(run_cli(d.path(), "eigs-find", r#"{"problem": {"type": "free"}}"#, &[]), 2);
    assert_eq!(run_cli(d.path(), "m-eval", "not json", &[]), 2);
    assert!(!d.path().join("error.json").exists());
}

#[test]
fn numerical_failure_writes_record() {
    let d = tempfile::tempdir().unwrap();
    let cfg = r#"{"problem": {"type": "coefficients", "q": {"segments": [{"terms": [{"constant": {"value": 1}}]}]},
        "ode": {"rtol": 1e-10, "atol": 1e-13, "max_steps": 3, "verify_doubling": false}}}"#;
    assert_eq!(run_cli(d.path(), "m-eval", cfg, &[]), 1);
    let e = json(&d.path().join("error.json"));
    assert_eq!(e["status"], "numerical_failure");
    assert_eq!(e["command"], "m-eval");
    assert!(!e["kind"].as_str().unwrap().is_empty());
}

#[test]
fn q0_necessary_scan_grows_like_inverse_sqrt() {
    let d = tempfile::tempdir().unwrap();
    let cfg = r#"{"problem": {"type": "example_q0"}, "scan": {"necessary": true}}"#;
    assert_eq!(run_cli(d.path(), "criterion-scan", cfg, &[]), 0);
    let rows = csv_rows(&d.path().join("ratio.csv"));
    assert_eq!(rows[0], ["abs_lambda", "arg_lambda", "ratio"]);
    let side = json(&d.path().join("ratio.json"));
    let p = side["summary"]["result"]["verdict"]["growth_detected"]["p"].as_f64().unwrap();
    assert!((p - 0.5).abs() < 0.05, "{p}");
}

#[test]
fn identical_runs_give_identical_csv() {
    let cfg = r#"{"problem": {"type": "example_a1"}, "scan": {"shift": 0.0}}"#;
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(run_cli(a.path(), "criterion-scan", cfg, &["--threads", "1"]), 0);
    assert_eq!(run_cli(b.path(), "criterion-scan", cfg, &[]), 0);
    assert_eq!(
        fs::read(a.path().join("ratio.csv")).unwrap(),
        fs::read(b.path().join("ratio.csv")).unwrap()
    );
}

#[test]
fn discrete_spectrum_of_a_well_has_pairs() {
    let d = tempfile::tempdir().unwrap();
    let cfg = r#"{"problem": {"type": "coefficients",
        "q": {"segments": [{"terms": [{"characteristic": {"from": -1, "to": 1, "value": -5}}]}]}},
        "discrete": {"half_width": 20, "n": 400}}"#;
    assert_eq!(run_cli(d.path(), "discrete-spectrum", cfg, &[]), 0);
    let rows = csv_rows(&d.path().join("spectrum.csv"));
    assert_eq!(rows[0], ["re", "im", "kind"]);
    assert_eq!(rows.len() - 1, 400 - rows.iter().filter(|r| r[2] == "pair").count());
    assert!(rows.iter().any(|r| r[2] == "pair"));
}

#[test]
fn discrete_functional_on_explicit_matrix() {
    let d = tempfile::tempdir().unwrap();
    let cfg = r#"{"functional": {"matrix": {"dense": [[0, 1], [0, 0]]}, "vector": [0, 1], "eps": [0.1, 0.01]}}"#;
    assert_eq!(run_cli(d.path(), "discrete-functional", cfg, &["--seed", "3"]), 0);
    let rows = csv_rows(&d.path().join("functional.csv"));
    assert_eq!(rows[0], ["eps", "value", "error_bar"]);
    let side = json(&d.path().join("functional.json"));
    let e = side["summary"]["eps_exponent"].as_f64().unwrap();
    assert!((e + 2.0).abs() < 0.1, "{e}");
    assert_eq!(side["seed"], 3);
}

#[test]
fn zone_build_and_eigs_find() {
    let d = tempfile::tempdir().unwrap();
    let cfg = r#"{"problem": {"type": "finite_zone", "zone": {"mu_r0": 0, "bands": [[1, 2]], "xi": [1.5], "eps": [1]}}}"#;
    assert_eq!(run_cli(d.path(), "zone-build", cfg, &[]), 0);
    let z = json(&d.path().join("zone.json"));
    assert!(z["summary"]["polynomials"]["residual"].as_f64().unwrap() < 1e-10);
    let cfg = r#"{"problem": {"type": "free"}, "eigs": {"rect": {"re_lo": -2, "re_hi": 2, "im_lo": 0.5, "im_hi": 2}}}"#;
    assert_eq!(run_cli(d.path(), "eigs-find", cfg, &[]), 0);
    assert_eq!(csv_rows(&d.path().join("eigs.csv")).len(), 1);
}

#[test]
fn classify_free() {
    let d = tempfile::tempdir().unwrap();
    let cfg = r#"{"problem": {"type": "free"}, "classify": {"even": true}}"#;
    assert_eq!(run_cli(d.path(), "classify", cfg, &[]), 0);
    let r = json(&d.path().join("classify.json"));
    assert_eq!(r["summary"]["herglotz_ok"], true);
    assert_eq!(r["summary"]["critical_point_zero"], "bounded_ratio");
    assert!(!d.path().join("classify.csv").exists());
}
