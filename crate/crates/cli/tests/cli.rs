use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn readout(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_readout"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

const PLUS: &str = r#"{"n": 1, "matrix": [[0.5,0],[0.5,0],[0.5,0],[0.5,0]]}"#;

#[test]
fn validate_amplitude_damping_is_classical() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", r#"{"builtin": "amplitude_damping", "params": {"gamma": 0.3}}"#);
    let out = readout(&["channel-validate", "--channel", s(&ch)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("C-classical: true"));
}

#[test]
fn validate_rotation_is_not_classical() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", r#"{"builtin": "rotation_y", "params": {"theta": 0.3}}"#);
    let out = readout(&["channel-validate", "--channel", s(&ch)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("C-classical: false"));
}

#[test]
fn validate_rejects_non_trace_preserving() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", r#"{"dim": 2, "kraus": [[[1,0],[0,0],[0,0],[0.5,0]]]}"#);
    let out = readout(&["channel-validate", "--channel", s(&ch)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_json_exits_2() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", "{\"dim\": 2, ");
    for cmd in ["channel-validate", "model-extract"] {
        assert_eq!(readout(&[cmd, "--channel", s(&ch)]).status.code(), Some(2));
    }
}

#[test]
fn missing_file_and_bad_flags_exit_2() {
    assert_eq!(
        readout(&["model-extract", "--channel", "/nonexistent/ch.json"]).status.code(),
        Some(2)
    );
    assert_eq!(readout(&["sample", "--shots"]).status.code(), Some(2));
    assert_eq!(readout(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn model_extract_dephasing() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", r#"{"builtin": "dephasing", "params": {"lambda": 0.5}}"#);
    let v = stdout_json(&readout(&["model-extract", "--channel", s(&ch)]));
    let a: Vec<Vec<f64>> = v["A"].as_array().unwrap().iter().map(floats).collect();
    for (i, row) in a.iter().enumerate() {
        for (j, &e) in row.iter().enumerate() {
            assert!((e - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
    }
    assert_eq!(v["C"], serde_json::json!([[0.0, 0.0], [0.0, 0.0]]));
    assert_eq!(v["column_order"], "lex-pairs-RI");
}

#[test]
fn model_extract_rotation_max_norm() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", r#"{"builtin": "rotation_y", "params": {"theta": 0.3}}"#);
    let v = stdout_json(&readout(&["model-extract", "--channel", s(&ch)]));
    let got = v["nonclassicality_max"].as_f64().unwrap();
    assert!((got - 0.3f64.sin()).abs() < 1e-12);
}

#[test]
fn model_extract_two_qubit_column_sums() {
    let dir = TempDir::new().unwrap();
    let ch = write(
        &dir,
        "ch.json",
        r#"{"tensor": [{"builtin": "rotation_y", "params": {"theta": 0.4}},
                       {"builtin": "amplitude_damping", "params": {"gamma": 0.2}}]}"#,
    );
    let v = stdout_json(&readout(&["model-extract", "--channel", s(&ch)]));
    let a: Vec<Vec<f64>> = v["A"].as_array().unwrap().iter().map(floats).collect();
    assert_eq!(a.len(), 4);
    for col in 0..4 {
        let sum: f64 = a.iter().map(|row| row[col]).sum();
        assert!((sum - 1.0).abs() < 1e-10);
    }
}

#[test]
fn model_file_round_trips_through_out() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", r#"{"builtin": "rotation_y", "params": {"theta": 0.7}}"#);
    let m1 = dir.path().join("m1.json");
    assert!(readout(&["model-extract", "--channel", s(&ch), "--out", s(&m1)]).status.success());
    let text = std::fs::read_to_string(&m1).unwrap();
    let model = readout_core::io::parse_model(&text).unwrap();
    let again = serde_json::to_string_pretty(&readout_core::io::model_to_json(&model)).unwrap();
    assert_eq!(text.trim_end(), again);
}

#[test]
fn forward_identity_on_plus() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", r#"{"builtin": "identity"}"#);
    let st = write(&dir, "st.json", PLUS);
    let v = stdout_json(&readout(&["forward", "--channel", s(&ch), "--state", s(&st), "--mode", "both"]));
    for key in ["z_model", "z_oracle"] {
        let z = floats(&v[key]);
        assert!((z[0] - 0.5).abs() < 1e-15 && (z[1] - 0.5).abs() < 1e-15);
    }
}

#[test]
fn forward_rotation_on_plus() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", r#"{"builtin": "rotation_y", "params": {"theta": 0.5}}"#);
    let st = write(&dir, "st.json", PLUS);
    let v = stdout_json(&readout(&["forward", "--channel", s(&ch), "--state", s(&st)]));
    let z = floats(&v["z"]);
    assert!((z[0] - (0.5 - 0.5 * 0.5f64.sin())).abs() < 1e-12);
    let o = stdout_json(&readout(&["oracle", "--channel", s(&ch), "--state", s(&st)]));
    assert!((floats(&o["z"])[0] - z[0]).abs() < 1e-12);
}

#[test]
fn forward_random_three_qubit_pair() {
    let dir = TempDir::new().unwrap();
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(9);
    let ch = readout_core::channels::random_channel(3, 3, &mut rng).unwrap();
    let rho = readout_core::state::random_density(3, 10).unwrap();
    let ch_path = write(&dir, "ch.json", &readout_core::io::channel_to_json(&ch).to_string());
    let st = serde_json::to_string(&readout_core::io::StateFile::from_density(&rho)).unwrap();
    let st_path = write(&dir, "st.json", &st);
    let v = stdout_json(&readout(&[
        "forward", "--channel", s(&ch_path), "--state", s(&st_path), "--mode", "both",
    ]));
    assert!(v["discrepancy"].as_f64().unwrap() <= 1e-11);
}

#[test]
fn forward_dimension_mismatch_exits_1() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", r#"{"tensor": [{"builtin": "identity"}, {"builtin": "identity"}]}"#);
    let st = write(&dir, "st.json", PLUS);
    let out = readout(&["forward", "--channel", s(&ch), "--state", s(&st)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sample_deterministic_outcome() {
    let dir = TempDir::new().unwrap();
    let z = write(&dir, "z.json", r#"{"z": [1.0, 0.0]}"#);
    let v = stdout_json(&readout(&["sample", "--z", s(&z), "--shots", "500", "--seed", "1"]));
    assert_eq!(v["counts"], serde_json::json!([500, 0]));
}

#[test]
fn sample_fair_coin_golden() {
    let dir = TempDir::new().unwrap();
    let z = write(&dir, "z.json", "[0.5, 0.5]");
    let args = ["sample", "--z", s(&z), "--shots", "1000000", "--seed", "2024"];
    let v = stdout_json(&readout(&args));
    assert_eq!(v["counts"], serde_json::json!([499166, 500834]));
    assert_eq!(stdout_json(&readout(&args)), v);
}

#[test]
fn sample_counts_sum_to_shots() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", r#"{"builtin": "rotation_y", "params": {"theta": 1.1}}"#);
    let st = write(&dir, "st.json", PLUS);
    let v = stdout_json(&readout(&[
        "sample", "--channel", s(&ch), "--state", s(&st), "--shots", "12345", "--seed", "7",
    ]));
    let total: u64 = v["counts"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(total, 12345);
}

#[test]
fn sample_rejects_unphysical_z() {
    let dir = TempDir::new().unwrap();
    let z = write(&dir, "z.json", "[1.5, -0.5]");
    let out = readout(&["sample", "--z", s(&z), "--shots", "10"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn mitigate_identity() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", r#"{"builtin": "identity"}"#);
    let z = write(&dir, "z.json", "[1.0, 0.0]");
    let v = stdout_json(&readout(&["mitigate", "--channel", s(&ch), "--z", s(&z)]));
    let x = floats(&v["x"]);
    assert!((x[0] - 1.0).abs() < 1e-6 && x[1].abs() < 1e-6);
    assert_eq!(v["converged"], true);
}

#[test]
fn mitigate_amplitude_damping() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", r#"{"builtin": "amplitude_damping", "params": {"gamma": 0.3}}"#);
    let m = dir.path().join("m.json");
    assert!(readout(&["model-extract", "--channel", s(&ch), "--out", s(&m)]).status.success());
    let z = write(&dir, "z.json", r#"{"z": [0.3, 0.7]}"#);
    let v = stdout_json(&readout(&["mitigate", "--model", s(&m), "--z", s(&z)]));
    let x = floats(&v["x"]);
    assert!(x[0].abs() < 1e-6 && (x[1] - 1.0).abs() < 1e-6);
}

#[test]
fn mitigate_rotation_from_oracle_z() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", r#"{"builtin": "rotation_y", "params": {"theta": 0.5}}"#);
    let st = write(&dir, "st.json", PLUS);
    let zpath = dir.path().join("z.json");
    let out = readout(&["oracle", "--channel", s(&ch), "--state", s(&st), "--out", s(&zpath)]);
    assert!(out.status.success());
    let v = stdout_json(&readout(&["mitigate", "--channel", s(&ch), "--z", s(&zpath)]));
    assert!(v["residual"].as_f64().unwrap() <= 1e-8);
    for key in ["x", "y", "residual", "iterations", "converged"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn mitigate_from_counts() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", r#"{"builtin": "amplitude_damping", "params": {"gamma": 0.3}}"#);
    let counts = write(&dir, "counts.json", r#"{"counts": [300, 700], "shots": 1000}"#);
    let v = stdout_json(&readout(&["mitigate", "--channel", s(&ch), "--counts", s(&counts)]));
    let x = floats(&v["x"]);
    assert!(x[0].abs() < 1e-6 && (x[1] - 1.0).abs() < 1e-6);
}

#[test]
fn mitigate_dimension_mismatch_exits_1() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", r#"{"builtin": "identity"}"#);
    let z = write(&dir, "z.json", "[0.25, 0.25, 0.25, 0.25]");
    let out = readout(&["mitigate", "--channel", s(&ch), "--z", s(&z)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn paper_examples_pass() {
    let out = readout(&["paper-examples"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.contains(": ok")).count(), 10);
    assert!(!text.contains("FAIL"));
}

#[test]
fn commands_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", r#"{"builtin": "rotation_y", "params": {"theta": 0.9}}"#);
    let st = write(&dir, "st.json", PLUS);
    let args = ["sample", "--channel", s(&ch), "--state", s(&st), "--shots", "999", "--seed", "4"];
    assert_eq!(readout(&args).stdout, readout(&args).stdout);
}
