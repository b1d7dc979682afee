//! End-to-end tests of the `covent` binary: exit codes, the one-line
//! stdout/stderr contracts, and the artifact files each subcommand writes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const EXP: &str = r#"{"kind":"exp","a":[1.0,0.0],"b":[0.0,0.0]}"#;
const SQUARE: &str = r#"{"kind":"poly","coeffs":[[0.0,0.0],[0.0,0.0],[1.0,0.0]]}"#;
const IDENTITY: &str = r#"{"kind":"poly","coeffs":[[0.0,0.0],[1.0,0.0]]}"#;
const QUINTIC: &str =
    r#"{"kind":"poly","coeffs":[[0.0,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0],[1.0,0.0]]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covent"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn out_dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn stdout_line(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).trim().to_string()
}

/// The stderr contract: exactly one line of JSON with `kind` and `message`.
fn stderr_json(output: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&output.stderr);
    let line = text.trim();
    assert!(
        !line.contains('\n'),
        "stderr should be a single line, got: {text}"
    );
    serde_json::from_str(line).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {text}"))
}

fn read_json(path: &Path) -> serde_json::Value {
    let raw = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    serde_json::from_str(&raw).unwrap_or_else(|e| panic!("{} is not JSON: {e}", path.display()))
}

#[test]
fn covering_search_certifies_the_exponential_and_reruns_identically() {
    let dir = out_dir("cov-exp");
    let args = [
        "covering-search",
        "--function",
        EXP,
        "--n-cover",
        "3",
        "--out-dir",
    ];
    let output = run(&[&args[..], &[dir.to_str().unwrap()]].concat());
    assert_eq!(exit_code(&output), 0, "stderr: {:?}", output.stderr);
    assert!(stdout_line(&output).contains("certificate"));

    let cert = read_json(&dir.join("certificate.json"));
    assert_eq!(cert["data"]["case_tag"], "IIb");
    assert_eq!(cert["data"]["n"], 3);
    let hash = cert["config_hash"].as_str().expect("hash string");
    assert_eq!(hash.len(), 16);
    assert!(hash.chars().all(|c| c.is_ascii_hexdigit()));

    let trace = read_json(&dir.join("trace.json"));
    assert!(trace["data"].is_array());
    assert_eq!(trace["config_hash"], cert["config_hash"]);
    for name in ["domain.svg", "heatmap.svg"] {
        let svg = std::fs::read_to_string(dir.join(name)).expect("svg written");
        assert!(svg.starts_with("<svg"), "{name} should be an SVG");
    }

    // Same configuration, fresh directory: artifacts must be byte-identical.
    let rerun_dir = out_dir("cov-exp-rerun");
    let rerun = run(&[&args[..], &[rerun_dir.to_str().unwrap()]].concat());
    assert_eq!(exit_code(&rerun), 0);
    for name in ["certificate.json", "trace.json", "domain.svg", "heatmap.svg"] {
        let first = std::fs::read(dir.join(name)).unwrap();
        let second = std::fs::read(rerun_dir.join(name)).unwrap();
        assert_eq!(first, second, "{name} differs between identical runs");
    }
}

#[test]
fn polynomial_search_reports_honest_exhaustion() {
    let dir = out_dir("cov-quintic");
    let output = run(&[
        "covering-search",
        "--function",
        QUINTIC,
        "--n-cover",
        "2",
        "--r-steps",
        "4",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 3);
    let err = stderr_json(&output);
    assert_eq!(err["kind"], "negative");
    assert!(err["message"].as_str().unwrap().contains("radius schedule"));

    // The trace survives the failure: one reasoned decision per radius.
    let trace = read_json(&dir.join("trace.json"));
    let steps = trace["data"].as_array().expect("trace array");
    assert_eq!(steps.len(), 4);
    for (index, step) in steps.iter().enumerate() {
        assert_eq!(step["step"], index as u64);
        assert!(!step["decision"].as_str().unwrap().is_empty());
    }
    assert!(!dir.join("certificate.json").exists());
}

#[test]
fn malformed_function_is_a_config_error() {
    let dir = out_dir("cov-bad-json");
    for broken in [r#"{"kind":"exp","a":"#, r#"{"kind":"mystery"}"#] {
        let output = run(&[
            "covering-search",
            "--function",
            broken,
            "--out-dir",
            dir.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&output), 2, "input: {broken}");
        assert_eq!(stderr_json(&output)["kind"], "config");
    }
}

#[test]
fn entropy_curve_for_the_squaring_map() {
    let dir = out_dir("ent-square");
    let output = run(&[
        "entropy",
        "--function",
        SQUARE,
        "--circle-points",
        "14",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0, "stderr: {:?}", output.stderr);

    let report = read_json(&dir.join("entropy.json"));
    let h = report["data"]["estimate"]["h_lower"].as_f64().unwrap();
    assert!(h >= 0.6, "squaring-map lower bound too small: {h}");
    assert!(report["data"]["certificate_bound"].is_null());

    let csv = std::fs::read_to_string(dir.join("entropy.csv")).expect("csv written");
    assert_eq!(csv.lines().nth(2), Some("n,delta,k_lower"));
    let svg = std::fs::read_to_string(dir.join("curve.svg")).expect("svg written");
    assert!(svg.starts_with("<svg"));
}

#[test]
fn entropy_of_the_identity_is_zero() {
    let dir = out_dir("ent-identity");
    let output = run(&[
        "entropy",
        "--function",
        IDENTITY,
        "--circle-points",
        "10",
        "--n-max",
        "4",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0);
    let report = read_json(&dir.join("entropy.json"));
    assert_eq!(report["data"]["estimate"]["h_lower"].as_f64(), Some(0.0));
}

#[test]
fn entropy_without_inputs_is_a_config_error() {
    let dir = out_dir("ent-empty");
    let output = run(&[
        "entropy",
        "--function",
        SQUARE,
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 2);
    let err = stderr_json(&output);
    assert_eq!(err["kind"], "config");
    assert!(err["message"].as_str().unwrap().contains("--certificate"));
}

#[test]
fn entropy_bound_from_a_covering_certificate() {
    let search_dir = out_dir("ent-cert-search");
    let search = run(&[
        "covering-search",
        "--function",
        EXP,
        "--n-cover",
        "2",
        "--out-dir",
        search_dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&search), 0, "stderr: {:?}", search.stderr);

    let dir = out_dir("ent-cert");
    let cert_path = search_dir.join("certificate.json");
    let output = run(&[
        "entropy",
        "--function",
        EXP,
        "--certificate",
        cert_path.to_str().unwrap(),
        "--blocks",
        "1",
        "--block-depth",
        "1",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0, "stderr: {:?}", output.stderr);

    let report = read_json(&dir.join("entropy.json"));
    let bound = &report["data"]["certificate_bound"];
    assert_eq!(bound["separated_count"], 2);
    assert_eq!(bound["meets_floor"], true);
    let lower = bound["entropy_lower"].as_f64().unwrap();
    assert!(
        (lower - 2.0_f64.ln()).abs() < 1e-12,
        "expected ln 2, got {lower}"
    );
    // No compact set was given, so there is no curve and no CSV.
    assert!(report["data"]["estimate"].is_null());
    assert!(!dir.join("entropy.csv").exists());
}

#[test]
fn example_product_reports_honest_verdicts() {
    let dir = out_dir("example-default");
    let output = run(&[
        "example-product",
        "--samples",
        "6",
        "--r-start",
        "268435456",
        "--r-steps",
        "2",
        "--seed",
        "7",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0, "stderr: {:?}", output.stderr);
    let line = stdout_line(&output);
    assert!(line.contains("entropy=pass"), "stdout: {line}");

    let report = read_json(&dir.join("example.json"));
    let data = &report["data"];
    let windows = data["windows"].as_array().expect("windows");
    assert_eq!(windows.len(), 4);
    // The innermost disk misses its single zero for almost every target,
    // and the second annulus is wide enough to pick up two zeros; both
    // window claims fail and the verdicts record that honestly.
    assert_eq!(windows[0]["disk_pass"], false);
    assert_eq!(windows[1]["annulus_pass"], false);
    assert_eq!(data["disk_verdict"], false);
    assert_eq!(data["annulus_verdict"], false);

    let entropy = &data["entropy"];
    assert_eq!(entropy["pass"], true);
    assert_eq!(entropy["certificate_case"], "IIa");
    assert_eq!(entropy["bound"]["separated_count"], 3);
}

#[test]
fn dense_zeros_fail_the_tail_guard() {
    let dir = out_dir("example-dense");
    let output = run(&[
        "example-product",
        "--zeros",
        "1e2,2e2",
        "--tail-modulus",
        "4.1e2",
        "--samples",
        "4",
        "--r-steps",
        "2",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 3);
    let err = stderr_json(&output);
    assert_eq!(err["kind"], "negative");
    assert!(err["message"].as_str().unwrap().contains("tail"));
}

#[test]
fn single_zero_counts_stay_within_one() {
    let dir = out_dir("example-single");
    let output = run(&[
        "example-product",
        "--zeros",
        "1e2",
        "--samples",
        "4",
        "--r-steps",
        "3",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0, "stderr: {:?}", output.stderr);

    let report = read_json(&dir.join("example.json"));
    let data = &report["data"];
    let windows = data["windows"].as_array().expect("windows");
    assert_eq!(windows.len(), 1);
    for key in ["disk_counts", "annulus_counts"] {
        for count in windows[0][key].as_array().unwrap() {
            assert!(count.as_u64().unwrap() <= 1, "{key}: {count}");
        }
    }
    // The short schedule finds no certificate; the stage says so instead
    // of failing the process.
    assert_eq!(data["entropy"]["pass"], false);
    assert!(data["entropy"]["note"].as_str().unwrap().contains("schedule"));
}

#[test]
fn measure_d_reports_a_certified_diameter() {
    let dir = out_dir("measure-case1");
    let output = run(&[
        "measure-d",
        "--scenario",
        "case1",
        "--radius",
        "64",
        "--trials",
        "8",
        "--seed",
        "17",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0, "stderr: {:?}", output.stderr);
    let report = read_json(&dir.join("measure.json"));
    assert_eq!(report["data"]["scenario"], "case1");
    let d = report["data"]["measured_d"].as_f64().unwrap();
    assert!(d.is_finite() && d > 0.0 && d < 30.0, "measured d: {d}");
}

#[test]
fn out_of_range_flags_are_config_errors() {
    let dir = out_dir("flag-errors");
    let eps = run(&[
        "measure-d",
        "--scenario",
        "case2",
        "--eps",
        "0.5",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&eps), 2);
    assert_eq!(stderr_json(&eps)["kind"], "config");

    let factor = run(&[
        "covering-search",
        "--function",
        EXP,
        "--r-factor",
        "1.0",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&factor), 2);
    assert_eq!(stderr_json(&factor)["kind"], "config");
}
