//! Sensitivity of blind subspaces to symmetry-breaking perturbations.

mod disorder;
mod field;
mod map;

pub use disorder::{disorder_ensemble, DisorderRun};
pub use field::{homogeneous_field_study, FieldStudy, CROSSING_TOL};
pub use map::{sensitivity_map, SensitivityMap, SensitivityOptions, TauWindow, Tracking};

use crate::spin_basis::{build_perturbation, ModelSpec, PerturbationKind};
use crate::Result;

/// [`sensitivity_map`] for one of the standard perturbation shapes.
pub fn sensitivity_map_for(
    model: &ModelSpec,
    kind: PerturbationKind,
    x_grid: &[f64],
    opts: &SensitivityOptions,
) -> Result<SensitivityMap> {
    let n = model.n_sites;
    sensitivity_map(model, |x| build_perturbation(kind, x, n), x_grid, opts)
}

#[cfg(test)]
mod tests;
