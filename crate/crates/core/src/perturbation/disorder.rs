use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::map::{sensitivity_map, SensitivityOptions};
use crate::spin_basis::{build_perturbation, disorder_strengths, realization_seed, ModelSpec, Pauli, PerturbationKind};
use crate::{Error, Result};

/// Robustness of the blind subspace under seeded random `Z` fields.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DisorderRun {
    pub omega: f64,
    pub n_sites: usize,
    pub master_seed: u64,
    pub x_grid: Vec<f64>,
    /// Seed of each realization.
    pub seeds: Vec<u64>,
    /// Site strengths of each realization.
    pub coefficients: Vec<Vec<f64>>,
    /// `robustness[r][xi] = 1 - sum_{n, A} tau_n^A`.
    pub robustness: Vec<Vec<f64>>,
}

impl DisorderRun {
    /// Ensemble mean robustness per grid point.
    pub fn mean(&self) -> Vec<f64> {
        let r = self.robustness.len() as f64;
        (0..self.x_grid.len()).map(|i| self.robustness.iter().map(|c| c[i]).sum::<f64>() / r).collect()
    }

    /// Number of sign changes of the discrete derivative of each curve.
    pub fn revivals(&self) -> Vec<usize> {
        self.robustness
            .iter()
            .map(|c| {
                let d: Vec<f64> = c.windows(2).map(|w| w[1] - w[0]).filter(|v| v.abs() > 1e-12).collect();
                d.windows(2).filter(|w| w[0].signum() != w[1].signum()).count()
            })
            .collect()
    }

    pub const CSV_HEADER: [&'static str; 4] = ["realization", "seed", "x", "robustness"];

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for (r, curve) in self.robustness.iter().enumerate() {
            for (x, v) in self.x_grid.iter().zip(curve) {
                out.push(vec![r.to_string(), self.seeds[r].to_string(), x.to_string(), format!("{v:.12e}")]);
            }
        }
        out
    }
}

/// Disorder ensemble on the J1-J2 ring. Realization `r` uses seed
/// `realization_seed(master_seed, r)`, so the same fields (restricted to the
/// first `N` sites) appear for every ring size and coupling.
pub fn disorder_ensemble(
    omega: f64,
    n_sites: usize,
    x_grid: &[f64],
    n_realizations: usize,
    master_seed: u64,
    opts: &SensitivityOptions,
) -> Result<DisorderRun> {
    if n_realizations == 0 {
        return Err(Error::InvalidArgument("need at least one realization".into()));
    }
    let model = ModelSpec::j1j2(n_sites, omega);
    let seeds: Vec<u64> = (0..n_realizations as u64).map(|r| realization_seed(master_seed, r)).collect();
    let robustness = seeds
        .par_iter()
        .map(|&seed| {
            let kind = PerturbationKind::Disorder { seed, pauli: Pauli::Z };
            let map = sensitivity_map(&model, |x| build_perturbation(kind, x, n_sites), x_grid, opts)?;
            Ok((0..x_grid.len()).map(|i| map.robustness(i)).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(DisorderRun {
        omega,
        n_sites,
        master_seed,
        x_grid: x_grid.to_vec(),
        coefficients: seeds.iter().map(|&s| disorder_strengths(s, n_sites)).collect(),
        seeds,
        robustness,
    })
}
