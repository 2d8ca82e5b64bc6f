// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn tomoct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tomoct"))
        .args(args)
        .env("TOMOCT_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = tomoct(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout(&out)
}

/// Value column of the first row named `name` with method `method`.
fn value<'a>(csv: &'a str, name: &str, method: &str) -> &'a str {
    csv.lines()
        .find_map(|l| {
            let mut parts = l.splitn(3, ',');
            (parts.next() == Some(name) && parts.next() == Some(method)).then(|| parts.next().unwrap())
        })
        .unwrap_or_else(|| panic!("no row {name},{method} in\n{csv}"))
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn noiseless_bell_state_reconstructs_exactly() {
    let dir = TempDir::new().unwrap();
    let record = path(&dir, "b1.json");
    ok(&["state", "simulate", "--state", "B1", "--out", &record]);
    for method in ["standard", "cco"] {
        let csv = ok(&["state", "reconstruct", "--in", &record, "--method", method, "--state", "B1"]);
        assert!(csv.starts_with("name,method,value\n"));
        assert_eq!(value(&csv, "fidelity", method), "1.000000");
        assert_eq!(value(&csv, "validity", method), "VALID");
    }
}

#[test]
fn simulate_without_out_prints_the_record() {
    let text = ok(&["state", "simulate", "--state", "01", "--noise-std", "0.05", "--seed", "3"]);
    assert!(text.contains("\"scheme\":[\"IX\""), "{text}");
    assert_eq!(text, ok(&["state", "simulate", "--state", "01", "--noise-std", "0.05", "--seed", "3"]));
}

#[test]
fn crafted_record_is_invalid_under_linear_inversion() {
    // ⟨ZZ⟩ = ⟨XX⟩ = −⟨YY⟩ = 1 with ⟨ZI⟩ = 1 is not a state: linear
    // inversion goes negative, the constrained fit stays physical.
    let dir = TempDir::new().unwrap();
    let record = path(&dir, "bad.json");
    let mut values = vec![0.0; 15];
    let labels: Vec<String> = (1..16).map(|m| tomoct::pauli::index_label(m, 2)).collect();
    for (l, v) in labels.iter().zip(values.iter_mut()) {
        *v = match l.as_str() {
            "ZZ" | "XX" | "ZI" => 1.0,
            "YY" => -1.0,
            _ => 0.0,
        };
    }
    let json = format!(
        r#"{{"scheme": {labels:?}, "values": {values:?}, "noise_std": 0.0, "seed": 0}}"#
    );
    fs::write(&record, json).unwrap();
    let csv = ok(&["state", "reconstruct", "--in", &record, "--method", "standard"]);
    assert_eq!(value(&csv, "validity", "standard"), "INVALID");
    let csv = ok(&["state", "reconstruct", "--in", &record, "--method", "cco"]);
    assert_eq!(value(&csv, "validity", "cco"), "VALID");
}

#[test]
fn malformed_input_exits_with_usage_code() {
    let dir = TempDir::new().unwrap();
    let bad = path(&dir, "bad.json");
    fs::write(&bad, "{\"scheme\": [\"XX\"], ").unwrap();
    let out = tomoct(&["state", "reconstruct", "--in", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    let out = tomoct(&["state", "reconstruct", "--in", &path(&dir, "missing.json")]);
    assert_eq!(out.status.code(), Some(2));
    let out = tomoct(&["process", "ideal", "--gate", "toffoli"]);
    assert_eq!(out.status.code(), Some(2));
    let out = tomoct(&["state", "simulate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn noiseless_cnot_reconstructs_to_the_ideal_process() {
    let csv = ok(&["process", "reconstruct", "--gate", "cnot", "--method", "cco"]);
    let f: f64 = value(&csv, "fidelity", "cco").parse().unwrap();
    assert!(f >= 0.999999, "{csv}");
    assert_eq!(value(&csv, "validity", "cco"), "VALID");
}

#[test]
fn noisy_linear_inversion_has_negative_eigenvalues() {
    let csv = ok(&[
        "process", "reconstruct", "--gate", "cnot", "--noise-std", "0.05", "--seed", "7", "--method", "standard",
    ]);
    let min: f64 = value(&csv, "min_eigenvalue", "standard").parse().unwrap();
    assert!(min < 0.0, "{csv}");
    assert_eq!(value(&csv, "validity", "standard"), "INVALID");
}

#[test]
fn simulated_data_file_feeds_reconstruction() {
    let dir = TempDir::new().unwrap();
    let data = path(&dir, "data.json");
    let chi = path(&dir, "chi.json");
    ok(&["process", "simulate", "--gate", "crx_pi", "--noise-std", "0.02", "--seed", "1", "--out", &data]);
    let from_file = ok(&["process", "reconstruct", "--gate", "crx_pi", "--in", &data, "--out", &chi]);
    let direct = ok(&["process", "reconstruct", "--gate", "crx_pi", "--noise-std", "0.02", "--seed", "1"]);
    // Reading renormalizes each state, so only roundoff-level rows differ.
    for name in ["eigenvalues", "fidelity", "avg_deviation", "validity"] {
        assert_eq!(value(&from_file, name, "cco"), value(&direct, name, "cco"), "{name}");
    }
    assert!(Path::new(&chi).exists());
    let kraus = ok(&["process", "kraus", "--in", &chi]);
    let n: usize = value(&kraus, "operators", "kraus").parse().unwrap();
    assert!((1..=16).contains(&n));
}

#[test]
fn ideal_cnot_has_a_single_kraus_operator() {
    let dir = TempDir::new().unwrap();
    let chi = path(&dir, "cnot.json");
    let kraus = path(&dir, "kraus.json");
    ok(&["process", "ideal", "--gate", "cnot", "--out", &chi]);
    let csv = ok(&["process", "kraus", "--in", &chi, "--out", &kraus]);
    assert_eq!(value(&csv, "operators", "kraus"), "1");
    assert_eq!(value(&csv, "weights", "kraus"), "1.000000");
    assert!(fs::read_to_string(&kraus).unwrap().contains("\"operators\""));
}

#[test]
fn custom_unitary_from_file() {
    let dir = TempDir::new().unwrap();
    let u = path(&dir, "swap.json");
    let mut data = vec![[0.0, 0.0]; 16];
    for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        data[r * 4 + c] = [1.0, 0.0];
    }
    fs::write(&u, format!(r#"{{"rows": 4, "cols": 4, "data": {data:?}}}"#)).unwrap();
    let spec = format!("file:{u}");
    let csv = ok(&["process", "reconstruct", "--gate", &spec]);
    let f: f64 = value(&csv, "fidelity", "cco").parse().unwrap();
    assert!(f >= 0.999999, "{csv}");
}

#[test]
fn missing_model_file_exits_with_usage_code() {
    let dir = TempDir::new().unwrap();
    let out = tomoct(&["lindblad", "chi", "--t", "0.05", "--model", &path(&dir, "nope.json")]);
    assert_eq!(out.status.code(), Some(2));
    let bad = path(&dir, "model.json");
    fs::write(&bad, r#"{"t1": [1, 1], "t2": [5, 1], "j_hz": 0, "p": 0.5}"#).unwrap();
    let out = tomoct(&["lindblad", "evolve", "--t", "1", "--model", &bad]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lindblad_chi_snapshots_over_times() {
    let dir = TempDir::new().unwrap();
    let snaps = dir.path().join("snaps");
    let csv = ok(&["lindblad", "chi", "--times", "0.05,0.5", "--out-dir", snaps.to_str().unwrap()]);
    let f1: f64 = value(&csv, "fidelity_vs_coherent[t=0.05]", "cco").parse().unwrap();
    let f2: f64 = value(&csv, "fidelity_vs_coherent[t=0.5]", "cco").parse().unwrap();
    assert!(f1 > f2 && f1 > 0.99, "{csv}");
    for t in ["0.05", "0.5"] {
        assert!(snaps.join(format!("chi_t{t}.json")).exists());
    }
}

#[test]
fn lindblad_evolve_and_bell_study() {
    let csv = ok(&["lindblad", "evolve", "--state", "B1", "--t", "0.5"]);
    let f: f64 = value(&csv, "fidelity_vs_initial", "lindblad").parse().unwrap();
    assert!(f > 0.0 && f < 1.0);
    let csv = ok(&["lindblad", "bell-study", "--times", "0.05"]);
    for b in ["B1", "B2", "B3", "B4"] {
        let f: f64 = value(&csv, &format!("fidelity_evolved_vs_predicted[{b}@t=0.05]"), "cco")
            .parse()
            .unwrap();
        assert!(f > 0.999999, "{csv}");
    }
}

#[test]
fn reproduce_passes_with_small_ensembles() {
    let csv = ok(&["reproduce", "--qst-runs", "4", "--qpt-runs", "1"]);
    assert!(csv.lines().filter(|l| l.starts_with("check:")).all(|l| l.ends_with(",PASS")), "{csv}");
    assert!(!csv.contains("FAIL"));
}
