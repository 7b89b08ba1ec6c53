//! End-to-end tests driving the compiled `shellstab` binary.

use std::process::{Command, Output};

fn shellstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shellstab"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Run the binary, assert success, and return stdout.
fn stdout_of(args: &[&str]) -> String {
    let out = shellstab(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process exited normally")
}

fn json_of(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout_of(args)).expect("valid json output")
}

#[test]
fn spectrum_free_particle_matches_known_roots() {
    let text = stdout_of(&["spectrum", "--G", "0", "--c", "3", "--levels", "3"]);
    assert!(text.starts_with("# units: hbar^2/(2 m a^2), G=0.00000, c=3.00000\n"));
    assert!(text.contains("N, q, E\n"));
    // Free roots q_N = N pi / (c + 1) with c = 3.
    assert!(text.contains("1, 0.785398, 0.616850\n"));
    assert!(text.contains("2, 1.57080, 2.46740\n"));
    assert!(text.contains("3, 2.35619, 5.55165\n"));
}

#[test]
fn spectrum_verify_accepts_converged_roots() {
    let out = shellstab(&["spectrum", "--G", "20", "--c", "5", "--verify"]);
    assert_eq!(exit_code(&out), 0);
}

#[test]
fn spectrum_reports_bound_state_only_for_strong_attraction() {
    let attractive = stdout_of(&["spectrum", "--G", "-3", "--c", "4", "--bound-state"]);
    assert!(attractive.contains("# bound: kappa=1.41072, E=-1.99013\n"));

    let repulsive = stdout_of(&["spectrum", "--G", "20", "--c", "4", "--bound-state"]);
    assert!(repulsive.contains("# bound: none\n"));
}

#[test]
fn spectrum_json_carries_levels_and_units() {
    let doc = json_of(&[
        "spectrum", "--G", "20", "--c", "5", "--levels", "2", "--format", "json",
    ]);
    assert_eq!(doc["units"], "hbar^2/(2 m a^2)");
    assert_eq!(doc["levels"].as_array().unwrap().len(), 2);
    assert_eq!(doc["levels"][0]["N"], 1);
}

#[test]
fn diagram_output_is_deterministic_and_out_matches_stdout() {
    let args = [
        "diagram",
        "--G",
        "20",
        "--c-min",
        "3",
        "--c-max",
        "4",
        "--c-steps",
        "11",
        "--levels",
        "4",
    ];
    let first = stdout_of(&args);
    let second = stdout_of(&args);
    assert_eq!(first, second, "two identical runs must agree byte for byte");

    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("diagram.csv");
    let mut with_out: Vec<&str> = args.to_vec();
    let path_str = path.to_str().unwrap();
    with_out.extend(["--out", path_str]);
    stdout_of(&with_out);
    let written = std::fs::read_to_string(&path).expect("output file exists");
    assert_eq!(written, first, "--out must write exactly the stdout bytes");
}

#[test]
fn extract_runs_all_three_methods_in_agreement() {
    let reports = json_of(&["extract", "--G", "20"]);
    let reports = reports.as_array().expect("json array");
    assert_eq!(reports.len(), 3);

    let expected = [
        ("fit", 8.97325, 0.258301),
        ("dos", 8.97343, 0.245985),
        ("qbp", 8.97966, 0.245045),
    ];
    for (report, (method, e_r, gamma)) in reports.iter().zip(expected) {
        assert_eq!(report["method"], method);
        assert_eq!(report["status"], "ok");
        assert_eq!(report["units"], "hbar^2/(2 m a^2)");
        assert!((report["E_r"].as_f64().unwrap() - e_r).abs() < 1e-3);
        assert!((report["Gamma"].as_f64().unwrap() - gamma).abs() < 1e-3);
    }
}

#[test]
fn extract_reports_method_failures_without_erroring() {
    let out = shellstab(&["extract", "--G", "5"]);
    assert_eq!(
        exit_code(&out),
        0,
        "method failures are findings, not errors"
    );
    let reports: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("valid json output");

    assert_eq!(reports[0]["method"], "fit");
    assert_eq!(reports[0]["status"], "failed");
    assert_eq!(reports[0]["error"], "NoPlateau");

    assert_eq!(reports[1]["method"], "dos");
    assert_eq!(reports[1]["status"], "failed");
    assert_eq!(reports[1]["error"], "WeakPeak");

    assert_eq!(reports[2]["method"], "qbp");
    assert_eq!(reports[2]["status"], "ok");
    assert!((reports[2]["E_r"].as_f64().unwrap() - 7.43055).abs() < 1e-3);
    assert!((reports[2]["Gamma"].as_f64().unwrap() - 1.89806).abs() < 1e-3);
}

#[test]
fn extract_output_is_deterministic() {
    let first = stdout_of(&["extract", "--G", "-10"]);
    let second = stdout_of(&["extract", "--G", "-10"]);
    assert_eq!(first, second);
}

#[test]
fn extract_qbp_honors_the_matching_point_flag() {
    let reports = json_of(&["extract", "--G", "20", "--method", "qbp", "--x0", "0.2"]);
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["x0"], 0.2);
    assert!((reports[0]["E_r"].as_f64().unwrap() - 8.97756).abs() < 1e-3);
}

#[test]
fn extract_dos_honors_an_explicit_window() {
    let reports = json_of(&[
        "extract", "--G", "20", "--method", "dos", "--window", "8.7,9.3",
    ]);
    assert_eq!(reports[0]["status"], "ok");
    assert_eq!(reports[0]["window"], serde_json::json!([8.7, 9.3]));
    assert!((reports[0]["E_r"].as_f64().unwrap() - 8.9734).abs() < 0.01);
}

#[test]
fn poles_prints_the_exact_resonance_parameters() {
    let text = stdout_of(&["poles", "--G", "-5"]);
    assert!(text.contains("n, Re_q, Im_q, E_r, Gamma\n"));
    assert!(text.contains("1, 3.59619, -0.300282, 12.8424, 4.31948\n"));
}

#[test]
fn poles_fails_with_numerical_exit_code_for_free_particle() {
    let out = shellstab(&["poles", "--G", "0"]);
    assert_eq!(exit_code(&out), 3, "no poles exist at G = 0");
    assert!(!out.stderr.is_empty());
}

#[test]
fn toy_sweeps_the_default_grid() {
    let text = stdout_of(&["toy"]);
    assert!(text.contains("L, lambda1, lambda2, lambda3\n"));
    let data_rows = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('L'))
        .count();
    assert_eq!(data_rows, 201);
}

#[test]
fn toy_without_coupling_reduces_to_crossing_diagonals() {
    let text = stdout_of(&["toy", "--delta1", "0", "--delta2", "0"]);
    // At L = 1 the first exterior mode crosses the interior level pi^2;
    // at L = 2 the second one does.
    assert!(text.contains("1.00000, 9.86960, 9.86960, 39.4784\n"));
    assert!(text.contains("2.00000, 2.46740, 9.86960, 9.86960\n"));
}

#[test]
fn config_file_supplies_values_and_flags_override_it() {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"G": 20.0, "c": 5.0, "levels": 3}"#).unwrap();
    let path_str = path.to_str().unwrap();

    let from_file = stdout_of(&["spectrum", "--config", path_str]);
    assert!(from_file.contains("G=20.0000, c=5.00000"));
    assert_eq!(
        from_file.lines().filter(|l| !l.starts_with('#')).count() - 1,
        3
    );

    let overridden = stdout_of(&["spectrum", "--config", path_str, "--levels", "5"]);
    assert_eq!(
        overridden.lines().filter(|l| !l.starts_with('#')).count() - 1,
        5
    );
}

#[test]
fn bad_configuration_exits_with_usage_code() {
    let dir = tempfile::tempdir().expect("temp dir");

    let wrong_type = dir.path().join("type.json");
    std::fs::write(&wrong_type, r#"{"G": "twenty"}"#).unwrap();
    let out = shellstab(&[
        "spectrum",
        "--config",
        wrong_type.to_str().unwrap(),
        "--c",
        "3",
    ]);
    assert_eq!(exit_code(&out), 2);

    let unknown_key = dir.path().join("key.json");
    std::fs::write(&unknown_key, r#"{"G": 20.0, "bogus": 1}"#).unwrap();
    let out = shellstab(&[
        "spectrum",
        "--config",
        unknown_key.to_str().unwrap(),
        "--c",
        "3",
    ]);
    assert_eq!(exit_code(&out), 2);

    let out = shellstab(&["spectrum", "--G", "20"]);
    assert_eq!(exit_code(&out), 2, "missing box size is a usage error");
}

#[test]
fn reproduce_paper_passes_every_benchmark_check() {
    let out = shellstab(&["reproduce-paper"]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8(out.stdout).expect("utf-8 output");
    assert!(text.contains("[PASS] poles G=20 n=1"));
    assert!(!text.contains("[FAIL]"));
    assert!(text.ends_with("57 checks: 57 passed, 0 failed\n"));
}
