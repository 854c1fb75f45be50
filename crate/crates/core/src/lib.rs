//! Blind-subspace metastability analysis for thermally coupled spin rings.
//!
//! The crate builds spin Hamiltonians on periodic rings, diagonalizes them,
//! assembles the thermal Lindbladian of a weakly coupled bath in the energy
//! eigenbasis and measures how well low-lying subspaces are hidden from the
//! bath couplers.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigensolve;
mod error;
pub mod metastability;
pub mod perturbation;
pub mod spin_basis;
pub mod symmetry;
pub mod thermal_lindblad;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

pub use eigensolve::{dense_spectrum, low_spectrum, SpectralData};
pub use spin_basis::{
    build_hamiltonian, build_perturbation, build_symmetry, ModelFamily, ModelSpec, Pauli,
    PauliString, PauliSum, PerturbationKind, SparseOperator, SymmetryKind,
};
