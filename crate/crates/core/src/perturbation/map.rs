use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigensolve::{dense_spectrum, low_spectrum, DenseOptions, SpectralData};
use crate::metastability::{find_blind_subspace, refined_spectrum_of, SpectrumOptions, EPS_DETECT, K_MAX};
use crate::spin_basis::{build_hamiltonian, site_zero_paulis, ModelSpec, Pauli, PauliString, SparseOperator};
use crate::{Error, Result};

/// Which matrix elements enter `tau`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TauWindow {
    /// Pairs `(i, k)` with `k` an excited member of the unperturbed blind subspace and `i` below it.
    BlindPairs,
    /// All pairs `i < j` among the lowest `size` states.
    AllPairs { size: usize },
}

/// How states are followed from one strength to the next.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tracking {
    /// Match by maximal overlap with the previous grid point.
    #[default]
    Overlap,
    /// Keep energy ordering.
    Raw,
}

#[derive(Clone, Debug)]
pub struct SensitivityOptions {
    pub window: TauWindow,
    pub tracking: Tracking,
    pub spectrum: SpectrumOptions,
}

impl Default for SensitivityOptions {
    fn default() -> Self {
        Self { window: TauWindow::BlindPairs, tracking: Tracking::Overlap, spectrum: SpectrumOptions::default() }
    }
}

/// `tau_n^A(x)` over a strength grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SensitivityMap {
    pub n_sites: usize,
    pub x_grid: Vec<f64>,
    /// Unperturbed blind members, if any.
    pub blind_indices: Vec<usize>,
    /// Number of unperturbed states whose matrix elements are summed.
    pub window_size: usize,
    /// `tau[x][site] = [tau_X, tau_Y, tau_Z]`.
    pub tau: Vec<Vec<[f64; 3]>>,
    /// Current energy rank of each followed state, per grid point.
    pub ranks: Vec<Vec<usize>>,
    /// A followed state changed rank or lost its identity since the previous grid point.
    pub crossing: Vec<bool>,
}

impl SensitivityMap {
    /// `(1 - sqrt(tau_X), 1 - sqrt(tau_Y), 1 - sqrt(tau_Z))`, clamped to `[0, 1]`.
    pub fn rgb(&self, xi: usize, site: usize) -> [f64; 3] {
        self.tau[xi][site].map(|t| (1.0 - t.max(0.0).sqrt()).clamp(0.0, 1.0))
    }

    /// `1 - sum_{n, A} tau_n^A`.
    pub fn robustness(&self, xi: usize) -> f64 {
        1.0 - self.tau[xi].iter().flatten().sum::<f64>()
    }

    /// Largest `tau` at a site over the grid points with `x <= x_max`.
    pub fn max_tau_at(&self, site: usize, x_max: f64) -> f64 {
        self.x_grid
            .iter()
            .zip(&self.tau)
            .filter(|(x, _)| **x <= x_max)
            .flat_map(|(_, row)| row[site])
            .fold(0.0, f64::max)
    }

    pub const CSV_HEADER: [&'static str; 9] = ["x", "site", "tauX", "tauY", "tauZ", "R", "G", "B", "crossing"];

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for (xi, &x) in self.x_grid.iter().enumerate() {
            for site in 0..self.n_sites {
                let t = self.tau[xi][site];
                let c = self.rgb(xi, site);
                out.push(vec![
                    x.to_string(),
                    site.to_string(),
                    format!("{:.10e}", t[0]),
                    format!("{:.10e}", t[1]),
                    format!("{:.10e}", t[2]),
                    format!("{:.6}", c[0]),
                    format!("{:.6}", c[1]),
                    format!("{:.6}", c[2]),
                    u8::from(self.crossing[xi]).to_string(),
                ]);
            }
        }
        out
    }
}

/// Lowest `k` eigenpairs of a perturbed Hamiltonian.
pub(crate) fn low_states(h: &SparseOperator, k: usize, opts: &SpectrumOptions) -> Result<SpectralData> {
    if h.n_sites() <= opts.dense_max_sites {
        Ok(dense_spectrum(h, &DenseOptions { max_dim: usize::MAX, ..Default::default() })?.truncated(k))
    } else {
        low_spectrum(h, k, &opts.lanczos)
    }
}

/// Unperturbed reference: refined low spectrum, blind members and followed states.
pub(crate) struct Reference {
    pub h0: SparseOperator,
    pub spec: SpectralData,
    pub blind: Vec<usize>,
    pub followed: Vec<usize>,
    pub window_size: usize,
}

pub(crate) fn reference(model: &ModelSpec, opts: &SensitivityOptions) -> Result<Reference> {
    let h0 = build_hamiltonian(model)?;
    let (spec, table) = refined_spectrum_of(&h0, model, false, &opts.spectrum)?;
    let blind = find_blind_subspace(&spec, &site_zero_paulis(model.n_sites)?, EPS_DETECT, K_MAX, Some(&table))?
        .map(|b| b.state_indices)
        .unwrap_or_default();
    let top = blind.last().copied();
    let (followed, window_size) = match opts.window {
        TauWindow::BlindPairs => {
            let top = top.ok_or_else(|| {
                Error::InvalidArgument("blind-pair window needs an unperturbed blind subspace".into())
            })?;
            (blind.clone(), top + 1)
        }
        TauWindow::AllPairs { size } => {
            if let Some(t) = top {
                if size < t + 1 {
                    return Err(Error::InvalidArgument(format!(
                        "window of {size} states is smaller than the blind subspace (top state {t})"
                    )));
                }
            }
            if size > spec.len() {
                return Err(Error::InvalidArgument(format!("window of {size} exceeds {} computed states", spec.len())));
            }
            ((0..size).collect(), size)
        }
    };
    Ok(Reference { h0, spec, blind, followed, window_size })
}

/// Pairs `(i, k)` in current energy ranks for the followed states' ranks.
fn pairs(window: TauWindow, ranks: &[usize], blind: &[usize], followed: &[usize]) -> Vec<(usize, usize)> {
    match window {
        TauWindow::BlindPairs => {
            let mut out = Vec::new();
            for (pos, t) in followed.iter().enumerate() {
                if blind.contains(t) {
                    out.extend((0..ranks[pos]).map(|i| (i, ranks[pos])));
                }
            }
            out.sort_unstable();
            out.dedup();
            out
        }
        TauWindow::AllPairs { .. } => {
            let mut out = Vec::new();
            for a in 0..ranks.len() {
                for b in a + 1..ranks.len() {
                    out.push((ranks[a].min(ranks[b]), ranks[a].max(ranks[b])));
                }
            }
            out
        }
    }
}

/// `tau[site][A] = sum over pairs |<e_i| A_site |e_k>|^2`.
pub(crate) fn tau_of(spec: &SpectralData, pairs: &[(usize, usize)]) -> Result<Vec<[f64; 3]>> {
    let n = spec.n_sites();
    let mut ks: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    ks.sort_unstable();
    ks.dedup();
    let v = spec.vectors();
    (0..n)
        .into_par_iter()
        .map(|site| {
            let mut row = [0.0; 3];
            for (a, &p) in Pauli::ALL.iter().enumerate() {
                let op = PauliString::single(n, site, p)?;
                for &k in &ks {
                    let mut pk = vec![Complex64::new(0.0, 0.0); spec.dim()];
                    op.apply(&spec.vector(k), &mut pk);
                    for &(i, kk) in pairs {
                        if kk == k {
                            let z: Complex64 = v.col(i).iter().zip(&pk).map(|(x, y)| x.conj() * y).sum();
                            row[a] += z.norm_sqr();
                        }
                    }
                }
            }
            Ok(row)
        })
        .collect()
}

/// Greedy maximal-overlap assignment of previous vectors onto current states.
/// Returns ranks and the smallest winning overlap.
fn assign(prev: &Mat<Complex64>, spec: &SpectralData) -> (Vec<usize>, f64) {
    let o = prev.adjoint() * spec.vectors();
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    for t in 0..prev.ncols() {
        for j in 0..spec.len() {
            cand.push((o[(t, j)].norm_sqr(), t, j));
        }
    }
    cand.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut ranks = vec![usize::MAX; prev.ncols()];
    let mut used = vec![false; spec.len()];
    let mut worst: f64 = 1.0;
    for (w, t, j) in cand {
        if ranks[t] == usize::MAX && !used[j] {
            ranks[t] = j;
            used[j] = true;
            worst = worst.min(w);
        }
    }
    (ranks, worst)
}

pub(crate) fn gather(spec: &SpectralData, ranks: &[usize]) -> Mat<Complex64> {
    Mat::from_fn(spec.dim(), ranks.len(), |r, c| spec.vectors()[(r, ranks[c])])
}

/// One tracking step from `prev` vectors to the spectrum at the next strength.
pub(crate) struct Step {
    pub ranks: Vec<usize>,
    pub crossing: bool,
    pub vectors: Mat<Complex64>,
}

pub(crate) fn track(
    prev: &Mat<Complex64>,
    prev_ranks: &[usize],
    spec: &SpectralData,
    tracking: Tracking,
    followed: &[usize],
) -> Step {
    let (ranks, worst) = match tracking {
        Tracking::Overlap => assign(prev, spec),
        Tracking::Raw => (followed.to_vec(), 1.0),
    };
    let crossing = ranks != prev_ranks || worst < 0.5;
    let vectors = gather(spec, &ranks);
    Step { ranks, crossing, vectors }
}

pub(crate) fn states_needed(r: &Reference, opts: &SensitivityOptions) -> usize {
    opts.spectrum.k_low.max(r.window_size + 6)
}

/// Sensitivity map of `model + perturbation(x)` over an increasing grid.
///
/// The spectra are computed in parallel; states are then followed through the
/// grid in order. A grid point at `x = 0` reuses the symmetry-refined
/// unperturbed eigenbasis.
pub fn sensitivity_map<F>(model: &ModelSpec, perturbation: F, x_grid: &[f64], opts: &SensitivityOptions) -> Result<SensitivityMap>
where
    F: Fn(f64) -> Result<SparseOperator> + Sync,
{
    check_grid(x_grid)?;
    let r = reference(model, opts)?;
    let k = states_needed(&r, opts);
    let spectra = x_grid
        .par_iter()
        .map(|&x| {
            if x == 0.0 {
                Ok(r.spec.clone())
            } else {
                low_states(&r.h0.add(&perturbation(x)?)?, k, &opts.spectrum)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut prev = gather(&r.spec, &r.followed);
    let mut prev_ranks = r.followed.clone();
    let mut tau = Vec::with_capacity(x_grid.len());
    let mut ranks = Vec::with_capacity(x_grid.len());
    let mut crossing = Vec::with_capacity(x_grid.len());
    for spec in &spectra {
        let step = track(&prev, &prev_ranks, spec, opts.tracking, &r.followed);
        tau.push(tau_of(spec, &pairs(opts.window, &step.ranks, &r.blind, &r.followed))?);
        crossing.push(step.crossing);
        prev = step.vectors;
        prev_ranks = step.ranks.clone();
        ranks.push(step.ranks);
    }
    Ok(SensitivityMap {
        n_sites: model.n_sites,
        x_grid: x_grid.to_vec(),
        blind_indices: r.blind,
        window_size: r.window_size,
        tau,
        ranks,
        crossing,
    })
}

pub(crate) fn check_grid(x_grid: &[f64]) -> Result<()> {
    if x_grid.is_empty() {
        return Err(Error::InvalidArgument("empty strength grid".into()));
    }
    if x_grid.windows(2).any(|w| !(w[0] < w[1])) || x_grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("strength grid must be finite and strictly increasing".into()));
    }
    Ok(())
}
