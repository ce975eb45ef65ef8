//! End-to-end tests of the command-line interface.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_karlin"))
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).expect("config written");
    path
}

const SMALL_VERIFY: &str = r#"
version = 1

[distribution]
kind = "zipf"
theta = 0.5
truncation_index = 50000
tail_mass_tol = 0.01

[experiment]
n = 5000
grid = [0.5, 1.0]
kmax = 1
regime = "fixed"
m_reps = 80
master_seed = 1967

[output]
formats = ["csv", "json"]
"#;

const SMALL_SIMULATE: &str = r#"
version = 1

[distribution]
kind = "zipf"
theta = 0.5
truncation_index = 20000
tail_mass_tol = 0.01

[experiment]
n = 2000
grid = [0.5, 1.0]
kmax = 2
m_reps = 5
master_seed = 11

[output]
formats = ["csv", "json"]
"#;

#[test]
fn no_arguments_shows_usage_and_exits_2() {
    let output = run(&[]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("Usage"), "{}", stderr(&output));
}

#[test]
fn theory_prints_the_endpoint_kernel_value() {
    let output = run(&["theory", "--theta", "0.5", "--i", "1", "--j", "1", "--tau", "1", "--t", "1"]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let value: f64 = stdout(&output).trim().parse().expect("a float on stdout");
    assert!((value - 0.734174).abs() < 1e-5, "printed {value}");
}

#[test]
fn theory_rejects_invalid_theta() {
    let output = run(&["theory", "--theta", "1.5"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("theta"), "{}", stderr(&output));
}

#[test]
fn theory_grid_tables_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    let second = dir.path().join("b");
    for out in [&first, &second] {
        let output = run(&[
            "theory",
            "--theta",
            "0.75",
            "--nu",
            "2",
            "--grid",
            "0.5,1.0",
            "--out-dir",
            out.to_str().unwrap(),
            "--format",
            "csv",
        ]);
        assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    }
    let a = fs::read(first.join("theory.csv")).unwrap();
    let b = fs::read(second.join("theory.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("i,j,tau,t,theta,c_star\n"), "{text}");
    assert_eq!(text.lines().count(), 1 + 4 * 4);
}

#[test]
fn config_semantic_errors_exit_2_with_key_paths() {
    let dir = tempfile::tempdir().unwrap();
    let bad = SMALL_VERIFY
        .replace("theta = 0.5", "theta = 1.5")
        .replace("grid = [0.5, 1.0]", "grid = [0.5, 0.2]");
    let path = write_config(dir.path(), "bad.toml", &bad);
    let output = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    let err = stderr(&output);
    assert!(err.contains("theta out of range (0,1]"), "{err}");
    assert!(err.contains("grid not ascending"), "{err}");
}

#[test]
fn config_syntax_errors_carry_a_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "broken.toml", "version = 1\n[distribution\n");
    let output = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("line 2"), "{}", stderr(&output));
}

#[test]
fn verify_small_experiment_passes_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "verify.toml", SMALL_VERIFY);
    let first = dir.path().join("a");
    let second = dir.path().join("b");
    for out in [&first, &second] {
        let output = run(&["verify", config.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
        assert_eq!(output.status.code(), Some(0), "{}\n{}", stdout(&output), stderr(&output));
        assert!(stdout(&output).contains("overall: PASS"), "{}", stdout(&output));
    }
    for file in ["verify_report.json", "verify_cov.csv", "verify_cov.json"] {
        let a = fs::read(first.join(file)).unwrap();
        let b = fs::read(second.join(file)).unwrap();
        assert!(!a.is_empty(), "{file} empty");
        assert_eq!(a, b, "{file} differs between identical runs");
    }
}

#[test]
fn verify_results_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "verify.toml", SMALL_VERIFY);
    let first = dir.path().join("t1");
    let second = dir.path().join("t2");
    for (out, threads) in [(&first, "1"), (&second, "2")] {
        let output = run(&[
            "verify",
            config.to_str().unwrap(),
            "--threads",
            threads,
            "--out-dir",
            out.to_str().unwrap(),
        ]);
        assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    }
    let a = fs::read(first.join("verify_report.json")).unwrap();
    let b = fs::read(second.join("verify_report.json")).unwrap();
    assert_eq!(a, b, "thread count changed the report");
}

#[test]
fn simulate_rows_mirror_between_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "simulate.toml", SMALL_SIMULATE);
    let out = dir.path().join("out");
    let output = run(&["simulate", config.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));

    let csv = fs::read_to_string(out.join("simulate.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("rep,t,k,raw,normalized"));
    let data: Vec<&str> = lines.collect();
    assert_eq!(data.len(), 5 * 2 * 2);

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("simulate.json")).unwrap()).unwrap();
    let rows = json.as_array().unwrap();
    assert_eq!(rows.len(), data.len());
    for (line, row) in data.iter().zip(rows) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0].parse::<u64>().unwrap(), row["rep"].as_u64().unwrap());
        assert_eq!(fields[1].parse::<f64>().unwrap(), row["t"].as_f64().unwrap());
        assert_eq!(fields[2].parse::<u64>().unwrap(), row["k"].as_u64().unwrap());
        assert_eq!(fields[3].parse::<u64>().unwrap(), row["raw"].as_u64().unwrap());
        assert_eq!(fields[4].parse::<f64>().unwrap(), row["normalized"].as_f64().unwrap());
    }
}

#[test]
fn estimate_reports_a_mean_index() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "estimate.toml",
        &SMALL_SIMULATE.replace("m_reps = 5", "m_reps = 20"),
    );
    let out = dir.path().join("out");
    let output = run(&["estimate", config.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    assert!(stdout(&output).contains("theta_hat mean"), "{}", stdout(&output));
    let csv = fs::read_to_string(out.join("estimate.csv")).unwrap();
    assert!(csv.starts_with("rep,r_n,theta_hat\n"), "{csv}");
    assert_eq!(csv.lines().count(), 1 + 20);
}

#[test]
fn gp_sampling_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "gp.toml", SMALL_SIMULATE);
    let first = dir.path().join("a");
    let second = dir.path().join("b");
    for out in [&first, &second] {
        let output = run(&["gp", config.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
        assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    }
    let a = fs::read(first.join("gp.csv")).unwrap();
    let b = fs::read(second.join("gp.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn seed_override_changes_simulated_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "simulate.toml", SMALL_SIMULATE);
    let first = dir.path().join("a");
    let second = dir.path().join("b");
    let base = run(&["simulate", config.to_str().unwrap(), "--out-dir", first.to_str().unwrap()]);
    assert_eq!(base.status.code(), Some(0));
    let reseeded = run(&[
        "simulate",
        config.to_str().unwrap(),
        "--seed",
        "999",
        "--out-dir",
        second.to_str().unwrap(),
    ]);
    assert_eq!(reseeded.status.code(), Some(0));
    let a = fs::read(first.join("simulate.csv")).unwrap();
    let b = fs::read(second.join("simulate.csv")).unwrap();
    assert_ne!(a, b, "seed override had no effect");
}

#[test]
fn environment_variable_sets_the_default_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "simulate.toml", SMALL_SIMULATE);
    let out = dir.path().join("from_env");
    let output = binary()
        .args(["simulate", config.to_str().unwrap()])
        .env("KARLIN_OUT_DIR", &out)
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    assert!(out.join("simulate.csv").exists());
}
