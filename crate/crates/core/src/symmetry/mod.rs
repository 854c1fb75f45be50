//! Degenerate-subspace refinement, symmetry eigenvalue tables and selection rules.

mod ops;
mod refine;
mod selection;
mod table;

pub use ops::Symmetry;
pub use refine::{refine_degenerate, refine_with, LEAKAGE_TOL};
pub use selection::{selection_rules, zero_reasons, SelectionEntry, ZeroReason};
pub use table::{format_label, symmetry_table, SymmetryColumn, SymmetryTable, TOL_SYM};

use crate::eigensolve::SpectralData;
use crate::spin_basis::{ModelSpec, SymmetryKind};
use crate::Result;

/// Translation, both parities and the bond reflection through bond `(N-1, 0)`.
pub fn standard_symmetries() -> Vec<Symmetry> {
    vec![
        Symmetry::Lattice(SymmetryKind::Translation),
        Symmetry::Lattice(SymmetryKind::PhaseZ),
        Symmetry::Lattice(SymmetryKind::ChargeX),
        Symmetry::Lattice(SymmetryKind::BondReflection { axis: 0 }),
    ]
}

/// Symmetries of a model: the standard set plus plaquette stabilizers where present.
pub fn model_symmetries(model: &ModelSpec) -> Result<Vec<Symmetry>> {
    let mut out = standard_symmetries();
    out.extend(
        model
            .stabilizers()?
            .into_iter()
            .enumerate()
            .map(|(index, string)| Symmetry::Stabilizer { index, string }),
    );
    Ok(out)
}

/// Refines degenerate clusters with the given symmetries, in order.
pub fn refine_by(spec: &SpectralData, symmetries: &[Symmetry]) -> Result<SpectralData> {
    let ops = symmetries
        .iter()
        .map(|s| s.operator(spec.n_sites()))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<_> = ops.iter().collect();
    refine_with(spec, &refs)
}

#[cfg(test)]
mod tests;
