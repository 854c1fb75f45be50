use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::pauli::{Pauli, PauliString, PauliSum};
use super::sparse::SparseOperator;
use crate::{Error, Result};

/// Perturbation shapes added to a Hamiltonian with a strength `x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PerturbationKind {
    /// `x sum_n P_n`
    GlobalField { pauli: Pauli },
    /// `x P_site`
    SiteField { site: usize, pauli: Pauli },
    /// `x P_site P_{site+1}`
    TwoSite { site: usize, pauli: Pauli },
    /// `x sum_n s_n P_n` with standard normal `s_n` drawn from `seed`.
    Disorder { seed: u64, pauli: Pauli },
}

impl PerturbationKind {
    pub fn pauli_sum(&self, strength: f64, n_sites: usize) -> Result<PauliSum> {
        let mut sum = PauliSum::new();
        let check = |site: usize| {
            if site >= n_sites {
                Err(Error::SiteOutOfRange { site, n_sites })
            } else {
                Ok(())
            }
        };
        match *self {
            PerturbationKind::GlobalField { pauli } => {
                for s in 0..n_sites {
                    sum.push(strength, PauliString::single(n_sites, s, pauli)?);
                }
            }
            PerturbationKind::SiteField { site, pauli } => {
                check(site)?;
                sum.push(strength, PauliString::single(n_sites, site, pauli)?);
            }
            PerturbationKind::TwoSite { site, pauli } => {
                check(site)?;
                let p = PauliString::new(
                    n_sites,
                    &[(site, pauli), ((site + 1) % n_sites, pauli)],
                    Complex64::new(1.0, 0.0),
                )?;
                sum.push(strength, p);
            }
            PerturbationKind::Disorder { seed, pauli } => {
                for (s, w) in disorder_strengths(seed, n_sites).into_iter().enumerate() {
                    sum.push(strength * w, PauliString::single(n_sites, s, pauli)?);
                }
            }
        }
        Ok(sum)
    }
}

/// Sparse matrix of `strength * V`.
pub fn build_perturbation(kind: PerturbationKind, strength: f64, n_sites: usize) -> Result<SparseOperator> {
    kind.pauli_sum(strength, n_sites)?.to_sparse(n_sites)
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of realization `index` derived from a master seed.
pub fn realization_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_mul(GOLDEN)))
}

/// Standard normal site strengths. Site `n` depends only on `(seed, n)`.
pub fn disorder_strengths(seed: u64, n_sites: usize) -> Vec<f64> {
    let normal = Normal::standard();
    (0..n_sites as u64)
        .map(|n| {
            let bits = splitmix64(seed ^ splitmix64(n + 1)) >> 11;
            let u = (bits as f64 + 0.5) / (1u64 << 53) as f64;
            normal.inverse_cdf(u)
        })
        .collect()
}
