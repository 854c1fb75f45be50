use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::blind::{find_blind_subspace, BlindSubspace, EPS_DETECT, K_MAX};
use super::pipeline::{refined_spectrum, SpectrumOptions};
use crate::spin_basis::{site_zero_paulis, ModelSpec, PauliString};
use crate::{Error, Result};

/// Bisection tolerance for transition points.
pub const TRANSITION_TOL: f64 = 1e-3;

/// Classification of one point of the diagram: blind dimension and protection label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhaseClass {
    pub dimension: usize,
    pub protection: String,
}

impl PhaseClass {
    fn of(blind: &Option<BlindSubspace>) -> Self {
        match blind {
            Some(b) => Self { dimension: b.dimension, protection: b.protection_label() },
            None => Self { dimension: 0, protection: "none".into() },
        }
    }
}

impl std::fmt::Display for PhaseClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.dimension, self.protection)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanPoint {
    pub omega: f64,
    pub class: PhaseClass,
    pub blind: Option<BlindSubspace>,
    /// `N exp(-beta Delta / 2)`, the leakage scale of the blind subspace.
    pub leakage_scale: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Transition {
    pub omega: f64,
    pub below: PhaseClass,
    pub above: PhaseClass,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhaseScan {
    pub n_sites: usize,
    pub beta: f64,
    pub points: Vec<ScanPoint>,
    pub transitions: Vec<Transition>,
}

/// Blind subspace of the J1-J2 ring at one frustration value.
pub fn classify_j1j2(
    n_sites: usize,
    omega: f64,
    couplers: &[PauliString],
    opts: &SpectrumOptions,
) -> Result<Option<BlindSubspace>> {
    let model = ModelSpec::j1j2(n_sites, omega);
    let (spec, table) = refined_spectrum(&model, false, opts)?;
    find_blind_subspace(&spec, couplers, EPS_DETECT, K_MAX, Some(&table))
}

/// Metastability diagram of the J1-J2 ring over a sorted `omega` grid.
///
/// `couplers` defaults to the single-site Paulis on site 0, which suffices for
/// translation-refined eigenstates. Changes of class between neighbouring grid
/// cells are located by bisection.
pub fn phase_scan(
    n_sites: usize,
    omegas: &[f64],
    beta: f64,
    couplers: Option<&[PauliString]>,
    opts: &SpectrumOptions,
) -> Result<PhaseScan> {
    if omegas.is_empty() {
        return Err(Error::InvalidArgument("empty omega grid".into()));
    }
    if omegas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("omega grid must be strictly increasing".into()));
    }
    let default;
    let couplers = match couplers {
        Some(c) => c,
        None => {
            default = site_zero_paulis(n_sites)?;
            &default
        }
    };
    let points = omegas
        .par_iter()
        .map(|&omega| {
            let blind = classify_j1j2(n_sites, omega, couplers, opts)?;
            let leakage_scale = blind.as_ref().map(|b| n_sites as f64 * (-beta * b.delta / 2.0).exp());
            Ok(ScanPoint { omega, class: PhaseClass::of(&blind), blind, leakage_scale })
        })
        .collect::<Result<Vec<_>>>()?;
    let cells: Vec<usize> = (1..points.len()).filter(|&i| points[i - 1].class != points[i].class).collect();
    let transitions = cells
        .par_iter()
        .map(|&i| {
            let (a, b) = (&points[i - 1], &points[i]);
            let (mut lo, mut hi) = (a.omega, b.omega);
            while hi - lo > TRANSITION_TOL {
                let mid = 0.5 * (lo + hi);
                let c = PhaseClass::of(&classify_j1j2(n_sites, mid, couplers, opts)?);
                if c == a.class {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(Transition { omega: 0.5 * (lo + hi), below: a.class.clone(), above: b.class.clone() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseScan { n_sites, beta, points, transitions })
}
