use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use quenchsim::inference::{fisher_asymptote, FisherProfile};

fn quenchsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quenchsim")).args(args).output().expect("spawn quenchsim")
}

fn run_to(args: &[&str], out: &Path) -> Output {
    let mut all = args.to_vec();
    let out = out.to_str().unwrap();
    all.extend(["--out", out]);
    quenchsim(&all)
}

/// Data rows of a CSV file (comment lines and header skipped).
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn header(text: &str) -> &str {
    text.lines().find(|l| !l.starts_with('#')).unwrap()
}

#[test]
fn fisher_plateaus_match_the_asymptote() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fisher.csv");
    let out = run_to(&["fisher", "--r", "0.75,1", "--phi-min", "0", "--phi-max", "6.283185307179586", "--steps", "4000"], &path);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(header(&text), "r,phi,fisher");
    let data = rows(&text);
    assert_eq!(data.len(), 8000);
    for r in [0.75f64, 1.0] {
        let plateau = fisher_asymptote(r.sinh().powi(2));
        // largest value within 0.05 of φ = π
        let near_pi = data
            .iter()
            .filter(|row| row[0].parse::<f64>().unwrap() == r)
            .filter(|row| (row[1].parse::<f64>().unwrap() - std::f64::consts::PI).abs() < 0.05)
            .map(|row| row[2].parse::<f64>().unwrap())
            .fold(0.0, f64::max);
        assert!((near_pi - plateau).abs() / plateau < 0.02, "r={r}: {near_pi} vs {plateau}");
    }
}

#[test]
fn unsqueezed_coherence_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coh.csv");
    assert!(run_to(&["coherence", "--r", "0", "--steps", "50"], &path).status.success());
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(header(&text), "r,phi,time_ns,sigma_x,p_plus");
    let data = rows(&text);
    assert_eq!(data.len(), 50);
    assert!(data.iter().all(|row| row[4].parse::<f64>().unwrap() == 1.0));
}

#[test]
fn malformed_config_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("never.csv");
    let out = run_to(&["fisher", "--r", "1", "--steps", "1"], &path);
    assert_eq!(out.status.code(), Some(2));
    assert!(!path.exists());
    let record: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(record["error"], "config");
    assert!(record["details"][0].as_str().unwrap().starts_with("steps"));
}

#[test]
fn error_classes_map_to_exit_codes() {
    let unstable = quenchsim(&["params", "--omega0-ghz", "1", "--omega-ghz", "0.5", "--chi-ghz", "0.5"]);
    assert_eq!(unstable.status.code(), Some(3));
    let overflow = quenchsim(&["fisher", "--r", "20", "--steps", "3"]);
    assert_eq!(overflow.status.code(), Some(4));
    let degenerate = quenchsim(&["mle-sim", "--r", "0", "--batches", "30", "--shots", "100"]);
    assert_eq!(degenerate.status.code(), Some(5));
    let both = quenchsim(&["fisher", "--r", "1", "--omega0-ghz", "3"]);
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn outputs_regenerate_themselves() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    let args = ["mle-sim", "--r", "1", "--shots", "500", "--batches", "40", "--seed", "3"];
    assert!(run_to(&args, &first).status.success());
    let cfg = first.to_str().unwrap();
    assert!(run_to(&["mle-sim", "--config", cfg], &second).status.success());
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"r": [1.0], "steps": 10, "seed": 4}"#).unwrap();
    let path = dir.path().join("out.csv");
    let out = run_to(&["fisher", "--config", cfg.to_str().unwrap(), "--steps", "7"], &path);
    assert!(out.status.success());
    assert_eq!(rows(&fs::read_to_string(&path).unwrap()).len(), 7);

    fs::write(&cfg, r#"{"r": [1.0], "stepz": 10}"#).unwrap();
    let out = run_to(&["fisher", "--config", cfg.to_str().unwrap()], &path);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fisher.json");
    assert!(run_to(&["fisher", "--r", "1", "--steps", "101"], &path).status.success());
    let value: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(value["meta"]["mode"], "fisher");
    assert_eq!(value["meta"]["seed"], 0);
    let profile: FisherProfile = serde_json::from_value(value["profiles"][0].clone()).unwrap();
    assert_eq!(profile.phis.len(), 101);
    let again = serde_json::to_value(&profile).unwrap();
    assert_eq!(again, value["profiles"][0]);
}

#[test]
fn sweep_field_columns_and_stability() {
    let out = quenchsim(&["sweep-field", "--field-min-t", "-0.25", "--field-max-t", "0.3", "--steps", "56"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(header(&text), "field_T,r,n_bar,omega_up_radns,stable");
    let data = rows(&text);
    assert_eq!(data[0][4], "false");
    assert_eq!(data[0][1], "");
    let stable: Vec<f64> = data.iter().filter(|r| r[4] == "true").map(|r| r[1].parse().unwrap()).collect();
    assert!(stable.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn adaptive_search_reports_stages() {
    let out = quenchsim(&["adaptive-search", "--stage-r", "0.3,0.6,1.0", "--seed", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let summary = text.lines().find_map(|l| l.strip_prefix("# summary: ")).unwrap();
    let summary: serde_json::Value = serde_json::from_str(summary).unwrap();
    assert_eq!(summary["status"], "localized");
    assert!(summary["error_in_sigmas"].as_f64().unwrap() < 4.0);
    assert_eq!(rows(&text).len(), 3);

    let failed = quenchsim(&["adaptive-search", "--stage-r", "0"]);
    assert_eq!(failed.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&failed.stderr).contains("failed_localization"));
}

#[test]
fn field_schedule_drives_the_search() {
    let out = quenchsim(&["adaptive-search", "--stage-fields-t", "-0.17,-0.19,-0.195", "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rs: Vec<f64> = v["report"]["stages"].as_array().unwrap().iter().map(|s| s["r"].as_f64().unwrap()).collect();
    assert!(rs.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn params_reports_the_reference_point() {
    let out = quenchsim(&["params", "--omega0-ghz", "3", "--omega-ghz", "0.5", "--chi-ghz", "0.5", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let w = std::f64::consts::TAU;
    let r = v["derived"]["r"].as_f64().unwrap();
    let direct = quenchsim::derive_quantities(&quenchsim::SystemParams::new(3.0 * w, 0.5 * w, 0.5 * w).unwrap()).unwrap();
    assert_eq!(r, direct.r);
}
