//! Pauli algebra, sparse operators, model Hamiltonians and lattice symmetries.

mod lattice;
mod model;
mod pauli;
mod perturb;
mod sparse;

pub use lattice::{build_symmetry, SymmetryKind};
pub use model::{build_hamiltonian, ModelFamily, ModelSpec, MAX_MODEL_SITES};
pub use pauli::{Pauli, PauliString, PauliSum, MAX_SITES};
pub use perturb::{
    build_perturbation, disorder_strengths, realization_seed, splitmix64, PerturbationKind,
};
pub use sparse::SparseOperator;

use crate::Result;

/// All single-site Paulis `X_n, Y_n, Z_n` on the ring.
pub fn single_site_paulis(n_sites: usize) -> Result<Vec<PauliString>> {
    let mut out = Vec::with_capacity(3 * n_sites);
    for s in 0..n_sites {
        for p in Pauli::ALL {
            out.push(PauliString::single(n_sites, s, p)?);
        }
    }
    Ok(out)
}

/// `X_0, Y_0, Z_0`.
pub fn site_zero_paulis(n_sites: usize) -> Result<Vec<PauliString>> {
    Pauli::ALL.iter().map(|&p| PauliString::single(n_sites, 0, p)).collect()
}

#[cfg(test)]
mod tests;
