use std::path::Path;
use std::process::Command;

use blindspin_cli::figures::{figure, FIGURES};
use blindspin_cli::ExperimentConfig;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_blindspin"));
    c.env_remove("BLINDSPIN_CACHE").env("RUST_LOG", "warn");
    c
}

fn write_config(dir: &Path, name: &str, body: serde_json::Value) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body.to_string()).unwrap();
    p
}

fn body(csv: &Path) -> String {
    std::fs::read_to_string(csv).unwrap().lines().filter(|l| !l.starts_with("# generated")).collect::<Vec<_>>().join("\n")
}

fn spectrum_config(out: &Path) -> serde_json::Value {
    serde_json::json!({
        "experiment": "spectrum",
        "model": {"family": "j1j2", "n_sites": 6, "omega": 0.0},
        "grids": {"omega": [0.0, 0.5]},
        "output_path": out,
    })
}

#[test]
fn spectrum_run_writes_tables_with_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", spectrum_config(&dir.path().join("res/spec")));
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("res/spec.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# config_sha256: "));
    assert!(lines[1].starts_with("# version: blindspin"));
    assert!(lines[2].starts_with("# generated: "));
    assert_eq!(lines[3], "N,param,k,energy,excitation,degeneracy");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("res/spec.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), lines.len() - 4);
    assert!(dir.path().join("res/spec.plot.json").exists());
}

#[test]
fn identical_configs_give_identical_bodies_with_and_without_cache() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_config(dir.path(), "config.json", spectrum_config(&dir.path().join("a")));
    let cache = dir.path().join("cache");
    assert!(bin().arg("run").arg(&a).status().unwrap().success());
    let cold = body(&dir.path().join("a.csv"));
    assert!(bin().arg("run").arg(&a).arg("--cache").arg(&cache).status().unwrap().success());
    assert_eq!(body(&dir.path().join("a.csv")), cold);
    assert!(std::fs::read_dir(&cache).unwrap().count() > 0);
    assert!(bin().arg("run").arg(&a).env("BLINDSPIN_CACHE", &cache).status().unwrap().success());
    assert_eq!(body(&dir.path().join("a.csv")), cold);
}

#[test]
fn empty_grid_is_rejected_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = spectrum_config(&dir.path().join("empty"));
    c["grids"]["omega"] = serde_json::json!([]);
    let cfg = write_config(dir.path(), "c.json", c);
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("empty.csv").exists());
    assert!(!dir.path().join("empty.json").exists());
}

#[test]
fn unknown_keys_and_infeasible_sizes_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = spectrum_config(&dir.path().join("x"));
    c["colour"] = serde_json::json!("blue");
    let out = bin().arg("run").arg(write_config(dir.path(), "u.json", c)).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let big = serde_json::json!({
        "experiment": "liouvillian_spectrum",
        "model": {"family": "j1j2", "n_sites": 8, "omega": 0.0},
        "grids": {"beta": [1.0]},
        "output_path": dir.path().join("big"),
    });
    let out = bin().arg("run").arg(write_config(dir.path(), "b.json", big)).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = bin().arg("run").arg(dir.path().join("missing.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reproduce_rejects_unknown_figure() {
    let out = bin().args(["reproduce", "fig42"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn every_figure_config_validates() {
    let dir = tempfile::tempdir().unwrap();
    for id in FIGURES {
        let cfg = figure(id, dir.path()).unwrap();
        assert!(cfg.output_path.ends_with(id));
        let again = ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(again.hash_hex(), cfg.hash_hex());
    }
}

#[test]
fn small_experiments_run() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        serde_json::json!({
            "experiment": "liouvillian_spectrum",
            "model": {"family": "j1j2", "n_sites": 4, "omega": 0.3},
            "grids": {"beta": [2.0]},
        }),
        serde_json::json!({
            "experiment": "blind_scan",
            "model": {"family": "j1j2", "n_sites": 6, "omega": 0.0},
            "grids": {"omega": [-1.0, 0.3, 2.0], "beta": [10.0]},
        }),
        serde_json::json!({
            "experiment": "boltzmann",
            "model": {"family": "j1j2", "n_sites": 6, "omega": 0.3},
            "grids": {"beta": [0.0, 10.0, 200.0]},
        }),
        serde_json::json!({
            "experiment": "beta_star",
            "model": {"family": "j1j2", "n_sites": 6, "omega": 0.3},
            "grids": {"n_sites": [6, 8]},
            "params": {"k_target": [0.5]},
        }),
        serde_json::json!({
            "experiment": "gap_vs_N",
            "model": {"family": "wen", "n_sites": 6},
            "grids": {"n_sites": [5, 6]},
        }),
        serde_json::json!({
            "experiment": "survival",
            "model": {"family": "j1j2", "n_sites": 4, "omega": 0.3},
            "grids": {"beta": [1.0, 2.0]},
        }),
        serde_json::json!({
            "experiment": "sensitivity",
            "model": {"family": "j1j2", "n_sites": 6, "omega": 0.3},
            "grids": {"x": [0.0, 0.5]},
            "params": {"perturbation": {"kind": "global_field", "pauli": "Z"}},
        }),
        serde_json::json!({
            "experiment": "disorder",
            "model": {"family": "j1j2", "n_sites": 6, "omega": 0.3},
            "grids": {"x": [0.0, 0.2]},
            "seeds": {"master": 5, "realizations": 2},
        }),
    ];
    for (i, mut c) in cases.into_iter().enumerate() {
        let stem = dir.path().join(format!("case{i}"));
        c["output_path"] = serde_json::json!(stem);
        let cfg = write_config(dir.path(), &format!("c{i}.json"), c.clone());
        let out = bin().arg("run").arg(&cfg).output().unwrap();
        assert!(out.status.success(), "{}: {}", c["experiment"], String::from_utf8_lossy(&out.stderr));
        let csv = std::fs::read_to_string(dir.path().join(format!("case{i}.csv"))).unwrap();
        assert!(csv.lines().count() > 4, "{} produced no rows", c["experiment"]);
    }
}
