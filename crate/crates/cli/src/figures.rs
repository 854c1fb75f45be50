use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

pub const FIGURES: [&str; 10] = ["fig1a", "fig1bc", "fig2b", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"];

fn range(start: f64, stop: f64, step: f64) -> Value {
    json!({"start": start, "stop": stop, "step": step})
}

fn j1j2(n: usize) -> Value {
    json!({"family": "j1j2", "n_sites": n, "omega": 0.0})
}

/// Canned desk-scale configuration of a figure.
pub fn figure_config(id: &str) -> CliResult<Value> {
    let cfg = match id {
        "fig1a" => json!({
            "experiment": "liouvillian_spectrum",
            "model": j1j2(6),
            "grids": {"omega": range(-1.0, 2.0, 0.05), "beta": [10.0]},
        }),
        "fig1bc" => json!({
            "experiment": "symmetry_table",
            "model": j1j2(6),
            "grids": {"omega": range(-1.0, 2.0, 0.05)},
        }),
        "fig2b" => json!({
            "experiment": "blind_scan",
            "model": j1j2(12),
            "grids": {"omega": range(-1.5, 2.5, 0.1), "beta": [10.0]},
            "params": {"diagnostics": false},
        }),
        "fig3" => json!({
            "experiment": "gap_vs_N",
            "model": j1j2(6),
            "grids": {"omega": [0.0, 0.5, 0.8, 2.0], "n_sites": [6, 8, 10, 12, 14, 16]},
        }),
        "fig4" => {
            let mut betas: Vec<f64> = (0..=80).map(|i| 0.5 * i as f64).collect();
            betas.extend([50.0, 75.0, 100.0, 150.0, 200.0]);
            json!({
                "experiment": "boltzmann",
                "model": j1j2(8),
                "grids": {"beta": betas, "n_sites": [8, 10, 12]},
            })
        }
        "fig5" => json!({
            "experiment": "sensitivity",
            "model": j1j2(14),
            "grids": {"omega": [-0.1, 0.6], "x": range(0.0, 1.0, 0.1)},
            "params": {"perturbation": {"kind": "site_field", "site": 7, "pauli": "Z"}},
        }),
        "fig6" => json!({
            "experiment": "sensitivity",
            "model": j1j2(14),
            "grids": {"omega": [-0.1], "x": range(0.0, 2.0, 0.2)},
            "params": {"perturbation": {"kind": "two_site", "site": 6, "pauli": "Z"}},
        }),
        "fig7" => json!({
            "experiment": "beta_star",
            "model": j1j2(8),
            "grids": {"omega": [-0.1, 0.6], "n_sites": [8, 10, 12]},
            "params": {"k_target": [1e-1, 1e-2, 1e-3]},
        }),
        "fig8" => json!({
            "experiment": "blind_scan",
            "model": j1j2(6),
            "grids": {"omega": range(-1.6, 2.2, 0.1), "n_sites": [6, 8, 10, 12], "beta": [10.0]},
            "params": {"diagnostics": false},
        }),
        "fig9" => json!({
            "experiment": "disorder",
            "model": j1j2(10),
            "grids": {"omega": [-0.1, 0.6], "n_sites": [10, 12], "x": range(0.0, 1.0, 0.05)},
            "seeds": {"master": 2024, "realizations": 8},
        }),
        other => {
            return Err(CliError::Config(format!("unknown figure '{other}'; known: {}", FIGURES.join(", "))))
        }
    };
    Ok(cfg)
}

/// The canned configuration with its output stem under `out_dir`.
pub fn figure(id: &str, out_dir: &std::path::Path) -> CliResult<ExperimentConfig> {
    let mut v = figure_config(id)?;
    v["output_path"] = json!(out_dir.join(id));
    ExperimentConfig::from_json(&v.to_string())
}
