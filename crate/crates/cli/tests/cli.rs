//! End-to-end checks of the `orbitee` binary: argument handling, file
//! outputs and checkpoints.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use orbitee_cli::{checkpoint, output};

fn orbitee(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbitee"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .unwrap()
}

fn temp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("orbitee-cli-test").join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("scenario.cfg");
    std::fs::write(&path, text).unwrap();
    path
}

const SMALL: &str = "steps_per_episode=20\nepisodes=2\nbuffer_capacity=100\nbatch_size=20\n";

#[test]
fn baseline_writes_all_result_files() {
    let dir = temp("baseline-files");
    let cfg = write_config(&dir, SMALL);
    let out = orbitee(
        &["baseline", "--policy", "min-radius", "--uavs", "2", "--config", cfg.to_str().unwrap()],
        &dir,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("episodes.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), output::EPISODE_HEADER);
    assert_eq!(lines.count(), 2);
    assert!(dir.join("aggregate.csv").exists());
    let manifest = std::fs::read_to_string(dir.join("manifest.txt")).unwrap();
    assert!(manifest.contains("policy: min-radius"));
    assert!(manifest.contains("steps_per_episode=20"));
}

#[test]
fn train_saves_loadable_checkpoints() {
    let dir = temp("train-ckpt");
    let cfg = write_config(&dir, SMALL);
    let out = orbitee(
        &["train", "--uavs", "2", "--seed", "3", "--config", cfg.to_str().unwrap()],
        &dir,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for i in 0..2 {
        let net = checkpoint::load(&dir.join(format!("weights_fleet2_uav{i}.bin"))).unwrap();
        assert_eq!(net.n_actions(), 5);
        let q = net.q_values(&[0.25; 64]);
        assert!(q.iter().all(|v| v.is_finite()));
    }
}

#[test]
fn sweep_covers_the_requested_fleet_sizes() {
    let dir = temp("sweep");
    let cfg = write_config(&dir, SMALL);
    let out = orbitee(
        &["sweep", "--uavs", "2..6", "--step", "2", "--config", cfg.to_str().unwrap()],
        &dir,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("episodes.csv")).unwrap();
    let sizes: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(sizes, ["2", "2", "4", "4", "6", "6"]);
    let agg = std::fs::read_to_string(dir.join("aggregate.csv")).unwrap();
    assert_eq!(agg.lines().count(), 4);
}

#[test]
fn unknown_config_keys_abort_the_run() {
    let dir = temp("bad-key");
    let cfg = write_config(&dir, "episodes=2\nbeam_width=30\n");
    let out = orbitee(
        &["baseline", "--policy", "hover", "--config", cfg.to_str().unwrap()],
        &dir,
    );
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("unknown configuration key"), "stderr: {stderr}");
}

#[test]
fn invalid_ranges_abort_the_run() {
    let dir = temp("bad-range");
    let cfg = write_config(&dir, "r_min_m=2000\n");
    let out = orbitee(
        &["baseline", "--policy", "hover", "--config", cfg.to_str().unwrap()],
        &dir,
    );
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("r_min_m"), "stderr: {stderr}");
}

#[test]
fn verify_passes_on_defaults() {
    let out = Command::new(env!("CARGO_BIN_EXE_orbitee"))
        .arg("verify")
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.matches("PASS").count(), 5, "stdout: {stdout}");
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn episode_override_flag_wins() {
    let dir = temp("episodes-flag");
    let cfg = write_config(&dir, SMALL);
    let out = orbitee(
        &[
            "baseline",
            "--policy",
            "energy-saving",
            "--uavs",
            "2",
            "--episodes",
            "3",
            "--config",
            cfg.to_str().unwrap(),
        ],
        &dir,
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.join("episodes.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}
