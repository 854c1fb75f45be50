use serde::{Deserialize, Serialize};

use crate::eigensolve::SpectralData;
use crate::spin_basis::PauliString;
use crate::{Error, Result};

/// Upper end of the inverse-temperature search.
pub const BETA_MAX: f64 = 500.0;

/// Boltzmann-weighted tail sums above a blind level `j`.
///
/// The sums run over `k >= j + 1`, so the degenerate level `j + 1` contributes
/// its full multiplicity and `C -> D` as `beta -> infinity`.
#[derive(Clone, Debug)]
pub struct BoltzmannSums {
    /// `e_k - e_{j+1}` for `k >= j + 1`.
    pub offsets: Vec<f64>,
    /// `|<e_k| S_a |e_j>|` per coupler, aligned with `offsets`.
    pub amplitudes: Vec<Vec<f64>>,
    /// Degeneracy of level `j + 1`.
    pub degeneracy: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoltzmannDiagnostics {
    pub beta: f64,
    pub k_per_coupler: Vec<f64>,
    pub k_summed: f64,
    pub c: f64,
    pub d: usize,
}

impl BoltzmannSums {
    pub fn new(spec: &SpectralData, couplers: &[PauliString], j_blind: usize) -> Result<Self> {
        if !spec.is_complete() {
            return Err(Error::PartialSpectrum);
        }
        if j_blind + 1 >= spec.len() {
            return Err(Error::InvalidArgument(format!("no level above state {j_blind}")));
        }
        let start = j_blind + 1;
        let e_ref = spec.energy(start);
        let offsets: Vec<f64> = spec.energies()[start..].iter().map(|e| (e - e_ref).max(0.0)).collect();
        let ej = spec.vector(j_blind);
        let amplitudes = couplers
            .iter()
            .map(|p| {
                let sv = p.to_sparse().apply_vec(&ej);
                (start..spec.len())
                    .map(|k| {
                        spec.vectors()
                            .col(k)
                            .iter()
                            .zip(&sv)
                            .map(|(a, b)| a.conj() * b)
                            .sum::<num_complex::Complex64>()
                            .norm()
                    })
                    .collect()
            })
            .collect();
        Ok(Self { offsets, amplitudes, degeneracy: spec.degeneracy(start) })
    }

    fn weight(&self, beta: f64, i: usize) -> f64 {
        (-beta * self.offsets[i] / 2.0).exp()
    }

    pub fn c(&self, beta: f64) -> f64 {
        (0..self.offsets.len()).map(|i| self.weight(beta, i)).sum()
    }

    pub fn k_a(&self, beta: f64, a: usize) -> f64 {
        self.amplitudes[a].iter().enumerate().map(|(i, m)| self.weight(beta, i) * m).sum()
    }

    pub fn k_summed(&self, beta: f64) -> f64 {
        (0..self.amplitudes.len()).map(|a| self.k_a(beta, a)).sum()
    }

    pub fn diagnostics(&self, beta: f64) -> BoltzmannDiagnostics {
        let k_per_coupler: Vec<f64> = (0..self.amplitudes.len()).map(|a| self.k_a(beta, a)).collect();
        BoltzmannDiagnostics {
            beta,
            k_summed: k_per_coupler.iter().sum(),
            k_per_coupler,
            c: self.c(beta),
            d: self.degeneracy,
        }
    }
}

/// `K_a`, `K`, `C` and `D` at one inverse temperature.
pub fn boltzmann_diagnostics(
    spec: &SpectralData,
    couplers: &[PauliString],
    beta: f64,
    j_blind: usize,
) -> Result<BoltzmannDiagnostics> {
    Ok(BoltzmannSums::new(spec, couplers, j_blind)?.diagnostics(beta))
}

/// Result of an inverse-temperature threshold search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaStar {
    Reached(f64),
    NotReached,
}

impl BetaStar {
    pub fn value(&self) -> Option<f64> {
        match self {
            BetaStar::Reached(b) => Some(*b),
            BetaStar::NotReached => None,
        }
    }
}

impl std::fmt::Display for BetaStar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BetaStar::Reached(b) => write!(f, "{b:.6}"),
            BetaStar::NotReached => write!(f, "not_reached"),
        }
    }
}

/// `inf { beta : f(beta') <= target for all beta' >= beta }` on `[0, beta_max]`.
///
/// The tail is located on a uniform grid and refined by bisection.
pub fn threshold_beta(f: impl Fn(f64) -> f64, target: f64, beta_max: f64) -> BetaStar {
    if f(beta_max) > target {
        return BetaStar::NotReached;
    }
    let steps = 2000;
    let h = beta_max / steps as f64;
    let mut lo = None;
    for i in (0..steps).rev() {
        let b = i as f64 * h;
        if f(b) > target {
            lo = Some(b);
            break;
        }
    }
    let Some(mut lo) = lo else { return BetaStar::Reached(0.0) };
    let mut hi = lo + h;
    while hi - lo > 1e-9 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    BetaStar::Reached(hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaStars {
    pub c: BetaStar,
    pub k: BetaStar,
    /// From `2 pi N exp(-beta delta / 2) K(beta) <= target`.
    pub full: BetaStar,
}

pub fn beta_stars(sums: &BoltzmannSums, target: f64, delta: f64, n_sites: usize) -> Result<BetaStars> {
    if !(target > 0.0) {
        return Err(Error::InvalidArgument("target must be positive".into()));
    }
    let two_pi_n = 2.0 * std::f64::consts::PI * n_sites as f64;
    Ok(BetaStars {
        c: threshold_beta(|b| sums.c(b), target, BETA_MAX),
        k: threshold_beta(|b| sums.k_summed(b), target, BETA_MAX),
        full: threshold_beta(|b| two_pi_n * (-b * delta / 2.0).exp() * sums.k_summed(b), target, BETA_MAX),
    })
}
