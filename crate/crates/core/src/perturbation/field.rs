use serde::{Deserialize, Serialize};

use super::map::{check_grid, gather, low_states, reference, states_needed, track, SensitivityMap, SensitivityOptions};
use super::map::sensitivity_map;
use crate::spin_basis::{build_perturbation, ModelSpec, Pauli, PerturbationKind};
use crate::Result;

/// Bisection tolerance for crossing strengths.
pub const CROSSING_TOL: f64 = 1e-3;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldStudy {
    pub omega: f64,
    pub n_sites: usize,
    /// First strength at which a blind state changes its energy rank.
    pub crossing: Option<f64>,
    pub map: SensitivityMap,
}

/// Uniform `x sum_n Z_n` on the J1-J2 ring: locates the first level crossing
/// that involves a member of the unperturbed blind subspace.
pub fn homogeneous_field_study(omega: f64, n_sites: usize, x_grid: &[f64], opts: &SensitivityOptions) -> Result<FieldStudy> {
    check_grid(x_grid)?;
    let model = ModelSpec::j1j2(n_sites, omega);
    let kind = PerturbationKind::GlobalField { pauli: Pauli::Z };
    let pert = |x: f64| build_perturbation(kind, x, n_sites);
    let map = sensitivity_map(&model, pert, x_grid, opts)?;
    let r = reference(&model, opts)?;
    let blind_pos: Vec<usize> =
        r.followed.iter().enumerate().filter(|(_, t)| r.blind.contains(t)).map(|(p, _)| p).collect();
    let start: Vec<usize> = blind_pos.iter().map(|&p| r.followed[p]).collect();
    let moved = |ranks: &[usize]| blind_pos.iter().zip(&start).any(|(&p, &s)| ranks[p] != s);
    let Some(hit) = map.ranks.iter().position(|rk| moved(rk)) else {
        return Ok(FieldStudy { omega, n_sites, crossing: None, map });
    };
    if hit == 0 {
        return Ok(FieldStudy { omega, n_sites, crossing: Some(x_grid[0]), map });
    }
    // Re-follow the states from the last unmoved grid point.
    let k = states_needed(&r, opts);
    let left_spec = if x_grid[hit - 1] == 0.0 {
        r.spec.clone()
    } else {
        low_states(&r.h0.add(&pert(x_grid[hit - 1])?)?, k, &opts.spectrum)?
    };
    let left_ranks = map.ranks[hit - 1].clone();
    let left = gather(&left_spec, &left_ranks);
    let (mut lo, mut hi) = (x_grid[hit - 1], x_grid[hit]);
    while hi - lo > CROSSING_TOL {
        let mid = 0.5 * (lo + hi);
        let spec = low_states(&r.h0.add(&pert(mid)?)?, k, &opts.spectrum)?;
        let step = track(&left, &left_ranks, &spec, opts.tracking, &r.followed);
        if moved(&step.ranks) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(FieldStudy { omega, n_sites, crossing: Some(0.5 * (lo + hi)), map })
}
