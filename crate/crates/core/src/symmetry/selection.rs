use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ops::Symmetry;
use super::table::SymmetryTable;
use crate::spin_basis::{PauliString, SymmetryKind};
use crate::Result;

const RULE_TOL: f64 = 1e-6;

/// Symmetry argument forcing a matrix element to vanish.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ZeroReason {
    ChargeX,
    PhaseZ,
    /// Combined bond reflection and translation fixing a single-site coupler.
    ReflectionTranslation,
    Reflection,
    Stabilizer(usize),
}

impl fmt::Display for ZeroReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZeroReason::ChargeX => write!(f, "X_N"),
            ZeroReason::PhaseZ => write!(f, "Z_N"),
            ZeroReason::ReflectionTranslation => write!(f, "RT"),
            ZeroReason::Reflection => write!(f, "R"),
            ZeroReason::Stabilizer(i) => write!(f, "S_{i}"),
        }
    }
}

fn reason_of(sym: &Symmetry) -> Option<ZeroReason> {
    match sym {
        Symmetry::Lattice(SymmetryKind::ChargeX) => Some(ZeroReason::ChargeX),
        Symmetry::Lattice(SymmetryKind::PhaseZ) => Some(ZeroReason::PhaseZ),
        Symmetry::Lattice(SymmetryKind::Translation) => None,
        Symmetry::Lattice(_) => Some(ZeroReason::Reflection),
        Symmetry::Stabilizer { index, .. } => Some(ZeroReason::Stabilizer(*index)),
    }
}

fn forbids(lj: Complex64, lk: Complex64, s: Complex64) -> bool {
    (lj.conj() * lk * s - Complex64::new(1.0, 0.0)).norm() > RULE_TOL
}

/// Symmetry reasons predicting `<e_j| P |e_k> = 0`; empty when nothing forbids it.
pub fn zero_reasons(table: &SymmetryTable, coupler: &PauliString, j: usize, k: usize) -> Result<Vec<ZeroReason>> {
    let mut out = Vec::new();
    for col in &table.columns {
        let (Some(lj), Some(lk)) = (col.values[j], col.values[k]) else { continue };
        let Some(reason) = reason_of(&col.symmetry) else { continue };
        if let Some(s) = col.symmetry.conjugation_sign(coupler)? {
            if forbids(lj, lk, s) && !out.contains(&reason) {
                out.push(reason);
            }
        }
    }
    // R_n T fixes a coupler on site n; its eigenvalue is the product of the two.
    if coupler.weight() == 1 {
        if let (Some(tj), Some(tk), Some(rj), Some(rk)) = (
            table.translation(j),
            table.translation(k),
            table.bond_reflection(j),
            table.bond_reflection(k),
        ) {
            if forbids(rj * tj, rk * tk, Complex64::new(1.0, 0.0)) {
                out.push(ZeroReason::ReflectionTranslation);
            }
        }
    }
    Ok(out)
}

/// One coupler matrix element with its symmetry prediction.
#[derive(Clone, Debug)]
pub struct SelectionEntry {
    pub j: usize,
    pub k: usize,
    pub coupler: usize,
    pub magnitude: f64,
    pub reasons: Vec<ZeroReason>,
}

impl SelectionEntry {
    pub fn predicted_zero(&self) -> bool {
        !self.reasons.is_empty()
    }
}

/// Predictions for every `(j, k)` with `j <= k < max_index` and every coupler.
///
/// `elements[a][(j, k)]` must hold `<e_j| couplers[a] |e_k>`.
pub fn selection_rules(
    table: &SymmetryTable,
    couplers: &[PauliString],
    elements: &[faer::Mat<Complex64>],
    max_index: usize,
) -> Result<Vec<SelectionEntry>> {
    let mut out = Vec::new();
    let max_index = max_index.min(table.len());
    for (a, p) in couplers.iter().enumerate() {
        for k in 0..max_index {
            for j in 0..=k {
                out.push(SelectionEntry {
                    j,
                    k,
                    coupler: a,
                    magnitude: elements[a][(j, k)].norm(),
                    reasons: zero_reasons(table, p, j, k)?,
                });
            }
        }
    }
    Ok(out)
}
