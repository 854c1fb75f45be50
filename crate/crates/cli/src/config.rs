use std::path::{Path, PathBuf};

use blindspin_core::metastability::K_MAX;
use blindspin_core::perturbation::{TauWindow, Tracking};
use blindspin_core::thermal_lindblad::QChoice;
use blindspin_core::{ModelFamily, ModelSpec, PerturbationKind};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Spectrum,
    LiouvillianSpectrum,
    SymmetryTable,
    BlindScan,
    #[serde(rename = "gap_vs_N")]
    GapVsN,
    Boltzmann,
    BetaStar,
    Survival,
    Sensitivity,
    Disorder,
}

/// A list of values or an inclusive arithmetic range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range(RangeSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn values(&self) -> CliResult<Vec<f64>> {
        let v = match self {
            Grid::List(v) => v.clone(),
            Grid::Range(r) => {
                if !(r.step > 0.0) || !(r.stop >= r.start) {
                    return Err(CliError::Config("range needs step > 0 and stop >= start".into()));
                }
                let n = ((r.stop - r.start) / r.step + 1e-9).floor() as usize;
                // Rounded so that grids such as 0.05 steps print cleanly.
                (0..=n).map(|i| ((r.start + i as f64 * r.step) * 1e12).round() / 1e12).collect()
            }
        };
        if v.is_empty() {
            return Err(CliError::Config("grid is empty".into()));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Config("grid contains non-finite values".into()));
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_sites: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seeds {
    pub master: u64,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
}

fn default_realizations() -> usize {
    8
}

/// Experiment-specific knobs; all optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_choice: Option<QChoice>,
    /// Number of low states on the iterative path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_low: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_eigenvalues: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_target: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<TauWindow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tracking: Option<Tracking>,
    /// Per-point diagnostics (Boltzmann sums, leakage) in blind scans.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<bool>,
    /// Measure survival times in blind scans.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub survival: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub model: ModelSpec,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Seeds>,
    #[serde(default)]
    pub params: Params,
    /// Output path stem; `.csv`, `.json` and `.plot.json` files are derived from it.
    pub output_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
}

/// Largest ring for complete spectra.
pub const COMPLETE_MAX_SITES: usize = 14;
/// Largest ring for Liouvillian assembly and propagation.
pub const LIOUVILLIAN_MAX_SITES: usize = 6;
/// Rings above this size run but are reported as slow.
pub const ITERATIVE_WARN_SITES: usize = 20;

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// SHA-256 of the canonical serialization.
    pub fn hash_hex(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.grids.n_sites.clone().unwrap_or_else(|| vec![self.model.n_sites])
    }

    pub fn omegas(&self) -> CliResult<Option<Vec<f64>>> {
        self.grids.omega.as_ref().map(Grid::values).transpose()
    }

    pub fn betas(&self) -> CliResult<Vec<f64>> {
        match &self.grids.beta {
            Some(g) => g.values(),
            None => Err(CliError::Config(format!("{:?} needs a beta grid", self.experiment))),
        }
    }

    pub fn xs(&self) -> CliResult<Vec<f64>> {
        match &self.grids.x {
            Some(g) => g.values(),
            None => Err(CliError::Config(format!("{:?} needs an x grid", self.experiment))),
        }
    }

    /// Every model of the `(N, omega)` grid, in row order.
    pub fn models(&self) -> CliResult<Vec<ModelSpec>> {
        let omegas = self.omegas()?;
        let mut out = Vec::new();
        for n in self.sizes() {
            match &omegas {
                Some(ws) => out.extend(ws.iter().map(|&w| ModelSpec { n_sites: n, omega: Some(w), ..self.model.clone() })),
                None => out.push(ModelSpec { n_sites: n, ..self.model.clone() }),
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> CliResult<()> {
        use Experiment::*;
        if self.grids.omega.is_some() && self.model.family != ModelFamily::J1j2 {
            return Err(CliError::Config("an omega grid applies only to the j1j2 family".into()));
        }
        if let Some(ns) = &self.grids.n_sites {
            if ns.is_empty() {
                return Err(CliError::Config("n_sites grid is empty".into()));
            }
        }
        for g in [&self.grids.omega, &self.grids.beta, &self.grids.x].into_iter().flatten() {
            g.values()?;
        }
        for m in self.models()? {
            m.validate().map_err(|e| CliError::Config(e.to_string()))?;
        }
        let max_n = self.sizes().into_iter().max().unwrap_or(0);
        let ceiling = match self.experiment {
            LiouvillianSpectrum | Survival => Some(LIOUVILLIAN_MAX_SITES),
            Boltzmann | BetaStar => Some(COMPLETE_MAX_SITES),
            _ => None,
        };
        if let Some(c) = ceiling {
            if max_n > c {
                return Err(CliError::Infeasible(format!(
                    "{:?} needs N <= {c}, config asks for N = {max_n}",
                    self.experiment
                )));
            }
        }
        match self.experiment {
            LiouvillianSpectrum | Boltzmann | Survival => {
                self.betas()?;
            }
            Sensitivity | Disorder => {
                let xs = self.xs()?;
                if xs.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(CliError::Config("x grid must be strictly increasing".into()));
                }
            }
            BlindScan => {
                if let Some(ws) = self.omegas()? {
                    if ws.windows(2).any(|w| !(w[0] < w[1])) {
                        return Err(CliError::Config("omega grid must be strictly increasing".into()));
                    }
                }
            }
            _ => {}
        }
        if self.experiment == Sensitivity && self.params.perturbation.is_none() {
            return Err(CliError::Config("sensitivity needs params.perturbation".into()));
        }
        if self.experiment == Disorder && self.seeds.is_none() {
            return Err(CliError::Config("disorder needs seeds".into()));
        }
        if let Some(s) = &self.seeds {
            if s.realizations == 0 {
                return Err(CliError::Config("seeds.realizations must be at least 1".into()));
            }
        }
        if matches!(self.experiment, Disorder | BlindScan) && self.model.family != ModelFamily::J1j2 {
            return Err(CliError::Config(format!("{:?} is defined for the j1j2 family", self.experiment)));
        }
        if let Some(targets) = &self.params.k_target {
            if targets.is_empty() || targets.iter().any(|t| !(*t > 0.0)) {
                return Err(CliError::Config("k_target values must be positive".into()));
            }
        }
        if max_n > ITERATIVE_WARN_SITES {
            log::warn!("N = {max_n} runs on the iterative path and may take a long time");
        }
        Ok(())
    }

    pub fn k_low(&self) -> usize {
        self.params.k_low.unwrap_or(K_MAX + 4)
    }
}
