use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tenfold::io::{read_archive, SCHEMA_VERSION};
use tenfold::linalg::hermitian_eigenvalues;

fn tenfold(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tenfold")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn classify_sigma_z_with_conjugation() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "sz.json",
        r#"{"dim": 2, "g0_generators": [[[[1,0],[0,0]],[[0,0],[-1,0]]]],
            "t": {"w": [[[1,0],[0,0]],[[0,0],[1,0]]], "present": true},
            "c": {"w": null, "present": false}, "chirality": null, "nambu": false}"#,
    );
    let output = dir.path().join("report.json");
    let out = tenfold(&["--command", "classify", "--input", &input, "--output", output.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&output);
    assert_eq!(doc["schema_version"], SCHEMA_VERSION);
    let classes: Vec<&str> = doc["report"]["blocks"].as_array().unwrap().iter().map(|b| b["class"].as_str().unwrap()).collect();
    assert_eq!(classes, ["AI", "AI"]);
    let manifest = read_json(&dir.path().join("report.json.manifest.json"));
    assert_eq!(manifest["config"]["command"], "classify");
    assert!(manifest["toolkit_version"].is_string());
}

#[test]
fn classify_bare_nambu_space_is_class_d() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "nambu.json", r#"{"dim": 6, "g0_generators": [], "nambu": true}"#);
    let out = tenfold(&["--command", "classify", "--input", &input]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let json_start = stdout.find('{').unwrap();
    let doc: Value = serde_json::from_str(&stdout[json_start..]).unwrap();
    assert_eq!(doc["report"]["class"], "D");
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bad.json", "{\"dim\": 2,");
    assert_eq!(code(&tenfold(&["--command", "classify", "--input", &input])), 2);
    assert_eq!(code(&tenfold(&["--command", "classify"])), 2);
    assert_eq!(code(&tenfold(&["--command", "nonsense"])), 2);
}

#[test]
fn sampling_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for run in 0..2 {
        let output = dir.path().join(format!("run{run}.json"));
        let out = tenfold(&["--command", "sample", "--class", "A", "--n", "4", "--samples", "2", "--seed", "7", "--output", output.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        bytes.push(fs::read(&output).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn chiral_archive_has_index_zero_modes() {
    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("aiii");
    let out = tenfold(&["--command", "sample", "--class", "AIII", "--p", "3", "--q", "1", "--samples", "5", "--seed", "3", "--output", output.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let archive = read_archive(&output).unwrap();
    assert_eq!(archive.stream_ids, vec![0, 1, 2, 3, 4]);
    for m in &archive.matrices {
        let ev = hermitian_eigenvalues(m).unwrap();
        let radius = ev.iter().fold(0.0f64, |a, e| a.max(e.abs()));
        assert!(ev.iter().filter(|e| e.abs() <= 1e-8 * radius).count() >= 2);
    }
    let manifest = read_json(&output.join("manifest.json"));
    assert_eq!(manifest["stream_ids"].as_array().unwrap().len(), 5);
    assert!(fs::read_to_string(output.join("matrix_000000.csv")).unwrap().lines().any(|l| l == "i,j,re,im"));
}

#[test]
fn invalid_ensemble_spec_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("x.json");
    let out = tenfold(&["--command", "sample", "--class", "DIII", "--n", "6", "--output", output.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("validate ensemble spec"));
    assert_eq!(code(&tenfold(&["--command", "sample", "--class", "XYZ", "--n", "4", "--output", output.to_str().unwrap()])), 2);
}

#[test]
fn stats_on_gue_campaign_prefers_beta_two() {
    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("stats.json");
    let out = tenfold(&["--command", "stats", "--class", "A", "--n", "100", "--samples", "30", "--seed", "1", "--output", output.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let report = &read_json(&output)["report"];
    let ks = |k: &str| report[k].as_f64().unwrap();
    assert!(ks("ks_beta2") < ks("ks_beta1") && ks("ks_beta2") < ks("ks_beta4"));
}

#[test]
fn stats_on_class_c_archive_is_symmetric() {
    let dir = tempfile::tempdir().unwrap();
    let archive = dir.path().join("c.json");
    let out = tenfold(&["--command", "sample", "--class", "C", "--n", "60", "--samples", "40", "--seed", "2", "--output", archive.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let output = dir.path().join("stats.json");
    let out = tenfold(&["--command", "stats", "--input", archive.to_str().unwrap(), "--output", output.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(read_json(&output)["report"]["symmetry_violation"].as_f64().unwrap() < 1e-9);
}

#[test]
fn stats_on_empty_archive_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "empty.json", r#"{"schema_version": "1.0", "class": "A", "matrices": []}"#);
    let out = tenfold(&["--command", "stats", "--input", &input]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("spectral statistics"));
}

#[test]
fn verify_default_tiny_tolerance_and_filter() {
    let out = tenfold(&["--command", "verify"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let out = tenfold(&["--command", "verify", "--tol", "1e-16"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("[FAIL]"));
    let out = tenfold(&["--command", "verify", "--module-filter", "spectra"]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let checks: Vec<&str> = stdout.lines().filter(|l| l.starts_with('[')).collect();
    assert!(!checks.is_empty() && checks.iter().all(|l| l.contains("] spectra:")));
    assert_eq!(code(&tenfold(&["--command", "verify", "--module-filter", "nope"])), 2);
}

#[test]
fn invalid_thread_cap_exits_2() {
    let out = Command::new(env!("CARGO_BIN_EXE_tenfold"))
        .args(["--command", "verify", "--module-filter", "nambu"])
        .env("TENFOLD_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}
