//! End-to-end checks of the eigsolve binary.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eigsolve"))
}

fn temp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("eigsolve-cli-{name}"));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn run_writes_outputs_and_exits_zero() {
    let dir = temp_dir("run");
    let output = bin()
        .args([
            "run",
            "--preset",
            "x-half-pi",
            "--runs",
            "3",
            "--seed",
            "5",
            "--out-dir",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("runs: 3"), "{stdout}");
    for file in ["runs.jsonl", "summary.csv", "histogram.csv", "metadata.json"] {
        assert!(dir.join(file).exists(), "{file} missing");
    }
    let jsonl = std::fs::read_to_string(dir.join("runs.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 3);
    assert!(jsonl.lines().all(|l| l.contains("\"schema_version\":\"1\"")));
}

#[test]
fn run_respects_thread_env() {
    let output = bin()
        .args(["run", "--preset", "xx", "--runs", "2", "--seed", "1"])
        .env("EIGSOLVE_THREADS", "1")
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
}

#[test]
fn run_history_flag_records_outcomes() {
    let dir = temp_dir("history");
    let output = bin()
        .args([
            "run",
            "--preset",
            "x-half-pi",
            "--runs",
            "1",
            "--seed",
            "2",
            "--history",
            "--out-dir",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let jsonl = std::fs::read_to_string(dir.join("runs.jsonl")).unwrap();
    assert!(jsonl.contains("outcome_history"), "{jsonl}");
}

#[test]
fn conflicting_observable_flags_exit_one() {
    let output = bin()
        .args(["run", "--preset", "xx", "--observable-file", "foo.json"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1), "{output:?}");
}

#[test]
fn missing_observable_exits_one() {
    let output = bin().args(["run", "--runs", "1"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1), "{output:?}");
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("--preset"), "{stderr}");
}

#[test]
fn invalid_reward_factor_exits_one() {
    let output = bin()
        .args(["run", "--preset", "xx", "--r", "1.5"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1), "{output:?}");
}

#[test]
fn iteration_cap_exit_code_two() {
    // A cap of 1 cannot complete a stage, so every run fails to converge.
    let output = bin()
        .args([
            "run",
            "--preset",
            "x-half-pi",
            "--runs",
            "1",
            "--seed",
            "1",
            "--max-iters",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2), "{output:?}");
}

#[test]
fn export_then_run_from_file() {
    let dir = temp_dir("export");
    let output = bin()
        .args(["export", "--preset", "xy-gap2", "--out-dir"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let file = dir.join("xy-gap2.json");
    assert!(file.exists());

    let output = bin()
        .args(["run", "--observable-file"])
        .arg(&file)
        .args(["--runs", "1", "--seed", "3"])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
}

#[test]
fn vqe_reports_energy_and_shots() {
    let output = bin()
        .args([
            "vqe",
            "--preset",
            "x-half-pi",
            "--seed",
            "1",
            "--shots-per-step",
            "200",
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("energy:"), "{stdout}");
    assert!(stdout.contains("total shots:"), "{stdout}");
}

#[test]
fn compare_prints_ratio() {
    let dir = temp_dir("compare");
    let output = bin()
        .args(["compare", "--preset", "x-half-pi", "--seed", "1", "--out-dir"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("shot ratio"), "{stdout}");
    assert!(dir.join("compare.json").exists());
}

#[test]
fn noise_flag_accepted_and_validated() {
    let ok = bin()
        .args([
            "run", "--preset", "x-half-pi", "--runs", "1", "--seed", "1", "--noise-eps", "0.05",
        ])
        .output()
        .unwrap();
    assert!(ok.status.success(), "{ok:?}");
    let bad = bin()
        .args(["run", "--preset", "x-half-pi", "--noise-eps", "0.7"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1), "{bad:?}");
}
