//! End-to-end checks of the `ra-idnc` binary: run, sweep and verify
//! subcommands, config-file handling, CSV output, and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ra-idnc"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {args:?} failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ra-idnc-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn run_reports_completion() {
    let out = run_ok(&[
        "run",
        "--users",
        "4",
        "--messages",
        "5",
        "--msg-size",
        "1000000",
        "--scheduler",
        "broadcast",
        "--seed",
        "3",
    ]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("completed in 5 transmissions"), "{stdout}");
    assert!(stdout.contains("scheme=broadcast"));
}

#[test]
fn run_accepts_config_file_with_flag_overrides() {
    let dir = temp_dir("config");
    let config_path = dir.join("cell.conf");
    std::fs::write(
        &config_path,
        "users = 3\nmessages = 4\nscheduler = unicast\nmsg_size_bits = 500000\nshadowing_std_db = 2\n",
    )
    .unwrap();
    let out = run_ok(&[
        "run",
        "--config",
        config_path.to_str().unwrap(),
        "--seed",
        "1",
    ]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    // 3 users x 4 messages via unicast: exactly 12 transmissions.
    assert!(stdout.contains("completed in 12 transmissions"), "{stdout}");
}

#[test]
fn sweep_writes_csv_and_plot_script_deterministically() {
    let dir = temp_dir("sweep");
    let csv_a = dir.join("a.csv");
    let csv_b = dir.join("b.csv");
    for csv in [&csv_a, &csv_b] {
        run_ok(&[
            "sweep",
            "--axis",
            "users",
            "--values",
            "3,5",
            "--seeds",
            "2",
            "--schemes",
            "ra_idnc,broadcast",
            "--messages",
            "4",
            "--out",
            csv.to_str().unwrap(),
        ]);
    }
    let a = std::fs::read(&csv_a).unwrap();
    let b = std::fs::read(&csv_b).unwrap();
    assert_eq!(a, b, "sweep CSV must be byte-identical across reruns");

    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "scheme,seed,users,messages,msg_size_bits,shadowing_std_db,completion_s,mean_delay_s,max_delay_s,transmissions,completed"
    );
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 2);

    let script = std::fs::read_to_string(dir.join("a.py")).unwrap();
    assert!(script.contains("AXIS = \"users\""));
    assert!(script.starts_with("#!/usr/bin/env python3"));
}

#[test]
fn verify_passes() {
    let out = run_ok(&[
        "verify",
        "--trials",
        "150",
        "--instances",
        "25",
        "--seed",
        "5",
    ]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("oracle equivalence: PASS"));
    assert!(stdout.contains("clique/transmission bijection: PASS"));
    assert!(stdout.contains("multi-layer consistency: PASS"));
}

#[test]
fn usage_errors_exit_with_code_two() {
    let out = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["sweep", "--axis", "users"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["run", "--scheduler", "nonsense"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_code_one() {
    let out = bin()
        .args(["run", "--config", "/nonexistent/path.conf"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
