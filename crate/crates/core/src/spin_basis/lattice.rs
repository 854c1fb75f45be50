use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pauli::PauliString;
use super::sparse::SparseOperator;
use crate::{Error, Result};

/// Lattice symmetry operators of a periodic ring.
///
/// For the permutation symmetries `U P_m U^dagger = P_{f(m)}` with `f` given by
/// [`SymmetryKind::site_map`]. Translation satisfies `T^dagger P_n T = P_{n+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SymmetryKind {
    /// Product of `X` over all sites.
    ChargeX,
    /// Product of `Z` over all sites.
    PhaseZ,
    Translation,
    /// Mirror through the bond between `axis - 1` and `axis`.
    BondReflection { axis: usize },
    /// Mirror through site `axis`.
    SiteReflection { axis: usize },
}

impl SymmetryKind {
    pub fn label(&self) -> String {
        match self {
            SymmetryKind::ChargeX => "X_N".into(),
            SymmetryKind::PhaseZ => "Z_N".into(),
            SymmetryKind::Translation => "T".into(),
            SymmetryKind::BondReflection { axis } => format!("R_b{axis}"),
            SymmetryKind::SiteReflection { axis } => format!("R_s{axis}"),
        }
    }

    /// Whether the operator squares to the identity.
    pub fn is_involution(&self) -> bool {
        !matches!(self, SymmetryKind::Translation)
    }

    /// Site permutation of the permutation symmetries.
    pub fn site_map(&self, n_sites: usize) -> Result<Option<Vec<usize>>> {
        let n = n_sites as isize;
        let map = |f: &dyn Fn(isize) -> isize| -> Vec<usize> {
            (0..n).map(|m| f(m).rem_euclid(n) as usize).collect()
        };
        Ok(match *self {
            SymmetryKind::ChargeX | SymmetryKind::PhaseZ => None,
            SymmetryKind::Translation => Some(map(&|m| m - 1)),
            SymmetryKind::BondReflection { axis } => {
                check_axis(axis, n_sites)?;
                Some(map(&|m| 2 * axis as isize - 1 - m))
            }
            SymmetryKind::SiteReflection { axis } => {
                check_axis(axis, n_sites)?;
                Some(map(&|m| 2 * axis as isize - m))
            }
        })
    }

    /// `U P U^dagger` for a Pauli string `P`.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        let n = p.n_sites();
        match self {
            SymmetryKind::ChargeX => {
                let sign = if p.z_mask().count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                Ok(p.clone().with_phase(p.phase() * sign))
            }
            SymmetryKind::PhaseZ => {
                let sign = if p.x_mask().count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                Ok(p.clone().with_phase(p.phase() * sign))
            }
            _ => {
                let map = self.site_map(n)?.expect("permutation symmetry");
                Ok(p.permuted(|s| map[s]))
            }
        }
    }
}

fn check_axis(axis: usize, n_sites: usize) -> Result<()> {
    if axis >= n_sites {
        return Err(Error::InvalidAxis { axis, n_sites });
    }
    Ok(())
}

/// Sparse matrix of a lattice symmetry.
pub fn build_symmetry(kind: SymmetryKind, n_sites: usize) -> Result<SparseOperator> {
    if n_sites == 0 || n_sites > super::pauli::MAX_SITES {
        return Err(Error::InvalidModel(format!("ring size {n_sites} unsupported")));
    }
    let n = n_sites;
    match kind {
        SymmetryKind::ChargeX => Ok(SparseOperator::from_permutation(n, |b| b ^ ((1u64 << n) - 1))),
        SymmetryKind::PhaseZ => Ok(SparseOperator::from_diagonal(n, |b| {
            Complex64::new(if b.count_ones() % 2 == 1 { -1.0 } else { 1.0 }, 0.0)
        })),
        _ => {
            let map = kind.site_map(n)?.expect("permutation symmetry");
            Ok(SparseOperator::from_permutation(n, |b| {
                let mut out = 0u64;
                for (m, &t) in map.iter().enumerate() {
                    if b >> (n - 1 - m) & 1 == 1 {
                        out |= 1 << (n - 1 - t);
                    }
                }
                out
            }))
        }
    }
}
