//! End-to-end runs of the `qnft` binary: determinism, exit codes, and
//! output schemas.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qnft() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qnft"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qnft-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn assert_success(output: &Output) {
    assert!(
        output.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn demo_writes_all_artifacts_and_reaches_high_fidelity() {
    let dir = temp_dir("demo");
    let output = qnft()
        .args(["demo", "--seed", "7", "--shots", "20000", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_success(&output);

    for file in [
        "chain_log.jsonl",
        "round_reports.json",
        "tomography_report.json",
        "city_plot.json",
        "hinton_plot.json",
    ] {
        assert!(dir.join(file).exists(), "missing {file}");
    }

    // Chain log: header plus two committed blocks with the preset phases.
    let log = read(&dir.join("chain_log.jsonl"));
    let lines: Vec<&str> = log.lines().collect();
    assert_eq!(lines.len(), 3);
    let header: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(header["schema"], "qnft-chain-log");
    assert_eq!(header["version"], 1);
    let block1: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
    assert_eq!(block1["m"], 1);
    assert_eq!(block1["owner_bits"], "001");
    let theta_a = block1["theta_a"].as_f64().unwrap();
    assert!((theta_a - std::f64::consts::PI / 16.0).abs() < 1e-12);

    // Tomography report carries the fidelity bound.
    let tomo: serde_json::Value =
        serde_json::from_str(&read(&dir.join("tomography_report.json"))).unwrap();
    assert!(tomo["fidelity_vs_ideal"].as_f64().unwrap() > 0.98);
    assert_eq!(tomo["settings"], 81);

    // Plot data shapes: 16×16 cells for both Hinton parts.
    let hinton: serde_json::Value =
        serde_json::from_str(&read(&dir.join("hinton_plot.json"))).unwrap();
    assert_eq!(hinton["real"].as_array().unwrap().len(), 256);
    assert_eq!(hinton["imag"].as_array().unwrap().len(), 256);
    let city: serde_json::Value = serde_json::from_str(&read(&dir.join("city_plot.json"))).unwrap();
    assert_eq!(city["labels"].as_array().unwrap().len(), 16);

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn same_seed_gives_byte_identical_artifacts() {
    let dir_a = temp_dir("det-a");
    let dir_b = temp_dir("det-b");
    for dir in [&dir_a, &dir_b] {
        let output = qnft()
            .args(["demo", "--seed", "33", "--shots", "4096", "--out"])
            .arg(dir)
            .output()
            .unwrap();
        assert_success(&output);
    }
    for file in [
        "chain_log.jsonl",
        "round_reports.json",
        "tomography_report.json",
        "city_plot.json",
        "hinton_plot.json",
    ] {
        assert_eq!(
            read(&dir_a.join(file)),
            read(&dir_b.join(file)),
            "{file} differs between identical seeds"
        );
    }
    std::fs::remove_dir_all(&dir_a).ok();
    std::fs::remove_dir_all(&dir_b).ok();
}

#[test]
fn mint_extends_the_persisted_chain() {
    let dir = temp_dir("mint");
    let output = qnft()
        .args(["demo", "--seed", "3", "--shots", "1024", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_success(&output);
    let output = qnft()
        .args(["mint", "--seed", "4", "--rounds", "1", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_success(&output);
    let log = read(&dir.join("chain_log.jsonl"));
    assert_eq!(log.lines().count(), 4, "header + 3 blocks");

    // Three blocks exceed the tomography cap; the request is a
    // user-addressable error, not an internal breach.
    let output = qnft()
        .args(["calibrate", "--target", "0.8", "--seed", "4", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn invalid_config_exits_with_code_two() {
    let dir = temp_dir("badcfg");
    let config_path = dir.join("bad.json");
    // Budget-violating rounds: owner bits "111" encode 7π/16 per block at
    // m = 1; four such blocks with "111" tokens blow past π.
    let config = serde_json::json!({
        "peers": [{"id": "p0", "coins": 10.0}],
        "encoding": {"theta1": std::f64::consts::FRAC_PI_4, "base": 2, "info_len": 3,
                      "token_qubits": 3, "peer_k": 1},
        "policy": {"min_stake": 5.0, "reward": 1.0, "slash_fraction": 0.5,
                    "quorum": 1.0, "reset_age_on_win": true},
        "rounds": [
            {"owner_bits": "111", "token_bits": "111"},
            {"owner_bits": "111", "token_bits": "111"},
            {"owner_bits": "111", "token_bits": "111"},
            {"owner_bits": "111", "token_bits": "111"}
        ]
    });
    std::fs::write(&config_path, config.to_string()).unwrap();
    let output = qnft()
        .args(["demo", "--seed", "1", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("constraint"), "stderr: {stderr}");

    // Malformed field paths are reported precisely.
    let config = serde_json::json!({
        "peers": [],
        "encoding": {"theta1": 0.5, "base": 2, "info_len": 3,
                      "token_qubits": 3, "peer_k": 1},
        "policy": {"min_stake": 5.0, "reward": 1.0, "slash_fraction": 0.5,
                    "quorum": 1.0, "reset_age_on_win": true},
        "rounds": []
    });
    std::fs::write(&config_path, config.to_string()).unwrap();
    let output = qnft()
        .args(["demo", "--seed", "1", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("peers"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn seed_is_mandatory_in_ci_mode() {
    let dir = temp_dir("ci");
    let output = qnft()
        .args(["demo", "--shots", "256", "--out"])
        .arg(&dir)
        .env("CI", "true")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("seed"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn strict_mode_exits_three_on_abort() {
    let dir = temp_dir("strict");
    let config_path = dir.join("scaled.json");
    // Scaled mode with a second round whose info phase breaks the
    // θ_m = θ_1/n^{m−1} rule: every peer rejects, the round aborts.
    let config = serde_json::json!({
        "peers": [{"id": "p0", "coins": 10.0}, {"id": "p1", "coins": 10.0}],
        "encoding": {"theta1": std::f64::consts::FRAC_PI_4, "base": 2, "info_len": 3,
                      "token_qubits": 3, "peer_k": 1},
        "policy": {"min_stake": 5.0, "reward": 1.0, "slash_fraction": 0.5,
                    "quorum": 1.0, "reset_age_on_win": true},
        "scaled_mode": true,
        "shots": 256,
        "rounds": [
            {"owner_bits": "001", "token_bits": "001"},
            {"owner_bits": "010", "token_bits": "010"}
        ]
    });
    std::fs::write(&config_path, config.to_string()).unwrap();
    let output = qnft()
        .args(["demo", "--seed", "2", "--strict", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(
        output.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );

    // Without --strict the same run reports the abort and exits 0.
    let output = qnft()
        .args(["demo", "--seed", "2", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn tomo_works_from_log_and_from_config() {
    let dir = temp_dir("tomo");
    // From the persisted log.
    let output = qnft()
        .args(["demo", "--seed", "5", "--shots", "1024", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_success(&output);
    std::fs::remove_file(dir.join("tomography_report.json")).unwrap();
    let output = qnft()
        .args(["tomo", "--seed", "5", "--shots", "2048", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_success(&output);
    let tomo: serde_json::Value =
        serde_json::from_str(&read(&dir.join("tomography_report.json"))).unwrap();
    assert_eq!(tomo["shots_per_setting"], 2048);

    // Without a log: the configured rounds realized directly.
    let fresh = temp_dir("tomo-fresh");
    let output = qnft()
        .args(["tomo", "--seed", "5", "--shots", "1024", "--out"])
        .arg(&fresh)
        .output()
        .unwrap();
    assert_success(&output);
    assert!(fresh.join("tomography_report.json").exists());
    std::fs::remove_dir_all(&dir).ok();
    std::fs::remove_dir_all(&fresh).ok();
}

#[test]
fn attack_and_calibrate_write_reports() {
    let dir = temp_dir("attack");
    let output = qnft()
        .args([
            "attack",
            "intercept-resend",
            "--rounds",
            "500",
            "--seed",
            "6",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert_success(&output);
    let stats: serde_json::Value =
        serde_json::from_str(&read(&dir.join("attack_report.json"))).unwrap();
    assert_eq!(stats["rounds"], 500);
    assert_eq!(stats["expected_peer_pass_rate"], 0.5);

    let output = qnft()
        .args([
            "attack",
            "entangle-measure",
            "--seed",
            "6",
            "--shots",
            "4096",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert_success(&output);
    let leak: serde_json::Value =
        serde_json::from_str(&read(&dir.join("leak_report.json"))).unwrap();
    assert!(leak["max_analytic_deviation"].as_f64().unwrap() < 1e-12);

    let output = qnft()
        .args([
            "calibrate",
            "--target",
            "0.8",
            "--shots",
            "2048",
            "--seed",
            "6",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert_success(&output);
    let cal: serde_json::Value =
        serde_json::from_str(&read(&dir.join("calibration_report.json"))).unwrap();
    let p_star = cal["p_star"].as_f64().unwrap();
    assert!(p_star > 0.0 && p_star < 0.5);
    std::fs::remove_dir_all(&dir).ok();
}
