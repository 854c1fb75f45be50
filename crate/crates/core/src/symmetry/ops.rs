use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spin_basis::{build_symmetry, PauliString, SparseOperator, SymmetryKind};
use crate::Result;

/// A unitary symmetry: a lattice operation or a Pauli-string stabilizer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Symmetry {
    Lattice(SymmetryKind),
    Stabilizer { index: usize, string: PauliString },
}

impl Symmetry {
    pub fn label(&self) -> String {
        match self {
            Symmetry::Lattice(k) => k.label(),
            Symmetry::Stabilizer { index, .. } => format!("S_{index}"),
        }
    }

    pub fn is_involution(&self) -> bool {
        match self {
            Symmetry::Lattice(k) => k.is_involution(),
            Symmetry::Stabilizer { .. } => true,
        }
    }

    pub fn operator(&self, n_sites: usize) -> Result<SparseOperator> {
        match self {
            Symmetry::Lattice(k) => build_symmetry(*k, n_sites),
            Symmetry::Stabilizer { string, .. } => Ok(string.to_sparse()),
        }
    }

    /// `s` with `U P U^dagger = s P`, if `P` is mapped onto a multiple of itself.
    pub fn conjugation_sign(&self, p: &PauliString) -> Result<Option<Complex64>> {
        let image = match self {
            Symmetry::Lattice(k) => k.conjugate(p)?,
            Symmetry::Stabilizer { string, .. } => {
                let sign = if string.commutes_with(p) { 1.0 } else { -1.0 };
                p.clone().with_phase(p.phase() * sign)
            }
        };
        if image.x_mask() != p.x_mask() || image.z_mask() != p.z_mask() {
            return Ok(None);
        }
        Ok(Some(image.phase() / p.phase()))
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl From<SymmetryKind> for Symmetry {
    fn from(k: SymmetryKind) -> Self {
        Symmetry::Lattice(k)
    }
}
