//! End-to-end CLI contract: exit codes, JSON schema, file output, and
//! diagnostics, exercised through the real binary.

use std::process::{Command, Output};

use serde_json::Value;

fn infogeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_infogeom"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not valid JSON ({e}): {}",
            String::from_utf8_lossy(&output.stdout)
        )
    })
}

#[test]
fn demo_passes_with_schema_keys() {
    let out = infogeom(&["demo", "normal"]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    assert_eq!(json["demo"], "normal");
    assert_eq!(json["pass"], true);
    assert!(json["summary"]["max_abs_err"].as_f64().unwrap() <= 1e-8);
    assert_eq!(json["grid"]["points_total"], 10);
    assert_eq!(json["points"].as_array().unwrap().len(), 10);
}

#[test]
fn demo_tolerance_override_can_fail() {
    // Tighter than the engine's error floor on this grid: numeric failure.
    let out = infogeom(&["demo", "sphere-gaussian", "--tol", "1e-14"]);
    assert_eq!(out.status.code(), Some(1));
    let json = stdout_json(&out);
    assert_eq!(json["pass"], false);
}

#[test]
fn unknown_demo_is_usage_error_listing_names() {
    let out = infogeom(&["demo", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("sphere-gaussian"), "stderr: {stderr}");
    assert!(out.stdout.is_empty());
}

#[test]
fn verify_catalog_embedding() {
    let out = infogeom(&[
        "verify",
        "--embedding",
        "sphere2",
        "--construction",
        "gaussian",
        "--grid",
        "0.3:6:5,0.3:2.8:5",
        "--tol",
        "1e-5",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json = stdout_json(&out);
    assert_eq!(json["verify"]["embedding"], "sphere2");
    assert_eq!(json["verify"]["construction"], "gaussian");
    assert_eq!(json["pass"], true);
}

#[test]
fn verify_expression_embedding() {
    let out = infogeom(&[
        "verify",
        "--embedding",
        "cos(a);sin(a)",
        "--params",
        "a",
        "--construction",
        "sech",
        "--grid",
        "0:6:7",
        "--tol",
        "1e-5",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json = stdout_json(&out);
    assert_eq!(json["pass"], true);
    assert_eq!(json["grid"]["points_total"], 7);
}

#[test]
fn verify_mixed_construction_over_hyperbolic_patch() {
    let out = infogeom(&[
        "verify",
        "--embedding",
        "hyperbolic",
        "--construction",
        "mixed",
        "--bases",
        "normal,sech,cauchy",
        "--grid",
        "-3:3:3,1.1:4:3",
        "--tol",
        "1e-5",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json = stdout_json(&out);
    assert_eq!(
        json["verify"]["bases"],
        serde_json::json!(["normal", "sech", "cauchy"])
    );
}

#[test]
fn verify_parse_error_reports_column() {
    let out = infogeom(&[
        "verify",
        "--embedding",
        "a+",
        "--params",
        "a",
        "--construction",
        "gaussian",
        "--grid",
        "0:1:3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("column 3"), "stderr: {stderr}");
}

#[test]
fn verify_mixed_without_bases_is_usage_error() {
    let out = infogeom(&[
        "verify",
        "--embedding",
        "sphere2",
        "--construction",
        "mixed",
        "--grid",
        "0.3:6:3,0.3:2.8:3",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_grid_arity_mismatch_is_usage_error() {
    let out = infogeom(&[
        "verify",
        "--embedding",
        "sphere2",
        "--construction",
        "gaussian",
        "--grid",
        "0.3:6:5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("2 parameters"), "stderr: {stderr}");
}

#[test]
fn metric_subcommand_outputs_entries() {
    let out = infogeom(&["metric", "--family", "normal", "--theta", "0.0,1.0"]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    let entries = &json["metric"]["entries"];
    assert!((entries[0][0].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert!((entries[1][1].as_f64().unwrap() - 2.0).abs() < 1e-8);
    assert!(entries[0][1].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn metric_rejects_bad_inputs() {
    assert_eq!(
        infogeom(&["metric", "--family", "uniform", "--theta", "0,1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        infogeom(&["metric", "--family", "normal", "--theta", "0,abc"])
            .status
            .code(),
        Some(2)
    );
    // σ < 0 lies outside the parametric domain.
    assert_eq!(
        infogeom(&["metric", "--family", "normal", "--theta", "0,-1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn constant_values_match_closed_forms() {
    let out = infogeom(&["constant", "--kind", "D", "--base", "sech"]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    assert_eq!(json["constant"]["kind"], "D");
    assert_eq!(json["constant"]["base"], "sech");
    assert!((json["constant"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-10);
    assert!(json["constant"]["error_estimate"].as_f64().unwrap() < 1e-9);

    let out = infogeom(&["constant", "--kind", "E", "--base", "exponential"]);
    let json = stdout_json(&out);
    assert!((json["constant"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn constant_unknown_base_is_usage_error() {
    let out = infogeom(&["constant", "--kind", "D", "--base", "uniform"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file_and_pretty_goes_to_stderr() {
    let dir = std::env::temp_dir().join(format!("infogeom-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = infogeom(&[
        "demo",
        "cauchy",
        "--out",
        path.to_str().unwrap(),
        "--pretty",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty(), "JSON should go to the file");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("PASS"), "stderr: {stderr}");
    let contents = std::fs::read_to_string(&path).unwrap();
    let json: Value = serde_json::from_str(&contents).unwrap();
    assert_eq!(json["demo"], "cauchy");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn stdout_json_is_machine_stable() {
    let out = infogeom(&["demo", "cauchy"]);
    let text = String::from_utf8(out.stdout).unwrap();
    // Exactly one line, no trailing whitespace before the newline.
    assert!(text.ends_with('\n'));
    let line = &text[..text.len() - 1];
    assert!(!line.contains('\n'));
    assert_eq!(line, line.trim_end());
    // Doubles survive a parse → serialize → parse cycle exactly.
    let value: Value = serde_json::from_str(line).unwrap();
    let reparsed: Value = serde_json::from_str(&serde_json::to_string(&value).unwrap()).unwrap();
    assert_eq!(value, reparsed);
    let emitted = value["summary"]["max_abs_err"].as_f64().unwrap();
    let recovered = reparsed["summary"]["max_abs_err"].as_f64().unwrap();
    assert_eq!(emitted.to_bits(), recovered.to_bits());
    // Identical invocations produce identical bytes.
    let again = infogeom(&["demo", "cauchy"]);
    assert_eq!(text, String::from_utf8(again.stdout).unwrap());
}
