use std::collections::BTreeSet;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigensolve::SpectralData;
use crate::spin_basis::PauliString;
use crate::symmetry::{zero_reasons, SymmetryTable, ZeroReason};
use crate::Result;

/// Default threshold below which a coupler matrix element counts as zero.
pub const EPS_DETECT: f64 = 1e-8;
/// Default number of low states examined.
pub const K_MAX: usize = 12;

/// Low-lying states hidden from every coupler.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlindSubspace {
    /// Ascending state indices; always starts with 0.
    pub state_indices: Vec<usize>,
    pub dimension: usize,
    pub protecting_symmetries: BTreeSet<ZeroReason>,
    /// `min(e_{j+1} - e_j, e_p - e_0)` with `j` the top member and `p` the lowest non-member.
    pub delta: f64,
    /// Largest matrix element among the vanishing ones.
    pub eps_achieved: f64,
    /// Smallest violating element among rejected candidates, for auditing the threshold.
    pub smallest_rejected: Option<f64>,
    /// Vanishing elements not predicted by any symmetry.
    pub unexplained_zeros: usize,
}

impl BlindSubspace {
    pub fn top(&self) -> usize {
        *self.state_indices.last().expect("non-empty")
    }

    /// Compact label such as `X_N+Z_N+RT`.
    pub fn protection_label(&self) -> String {
        let v: Vec<String> = self.protecting_symmetries.iter().map(|r| r.to_string()).collect();
        if v.is_empty() { "none".into() } else { v.join("+") }
    }
}

/// `<e_j| S_a |e_k>` for the first `k` states, one matrix per coupler.
pub fn coupler_elements(spec: &SpectralData, couplers: &[PauliString], k: usize) -> Result<Vec<Mat<Complex64>>> {
    let k = k.min(spec.len());
    let v = spec.vectors().subcols(0, k).to_owned();
    couplers
        .iter()
        .map(|p| {
            let sv = p.to_sparse().apply_mat(&v);
            Ok(v.adjoint() * sv)
        })
        .collect()
}

/// Searches the lowest `k_max` states (extended to a cluster boundary) for a blind subspace.
///
/// A state `k > 0` is a member when every coupler element `<e_j|S_a|e_k>` with
/// `j <= k` is below `eps`, and the ground state must have vanishing
/// expectation values. A member whose degenerate level is only partly blind is
/// dropped. With a symmetry table, each vanishing element is matched against
/// the selection rules.
pub fn find_blind_subspace(
    spec: &SpectralData,
    couplers: &[PauliString],
    eps: f64,
    k_max: usize,
    table: Option<&SymmetryTable>,
) -> Result<Option<BlindSubspace>> {
    if spec.len() < 2 || couplers.is_empty() {
        return Ok(None);
    }
    let kk = spec.cluster_boundary(k_max.max(1)).min(spec.len());
    let elems = coupler_elements(spec, couplers, kk)?;
    let mx = |j: usize, k: usize| elems.iter().map(|m| m[(j, k)].norm()).fold(0.0, f64::max);
    if mx(0, 0) > eps {
        return Ok(None);
    }
    let mut worst_by_k = vec![0.0f64; kk];
    for (k, w) in worst_by_k.iter_mut().enumerate() {
        *w = (0..=k).map(|j| mx(j, k)).fold(0.0, f64::max);
    }
    let mut candidate: Vec<bool> = worst_by_k.iter().map(|&w| w <= eps).collect();
    for c in spec.clusters() {
        if c.start >= kk || c.start == 0 {
            continue;
        }
        if !c.clone().all(|k| k < kk && candidate[k]) {
            c.clone().filter(|&k| k < kk).for_each(|k| candidate[k] = false);
        }
    }
    candidate[0] = true;
    let members: Vec<usize> = (0..kk).filter(|&k| candidate[k]).collect();
    let smallest_rejected = worst_by_k
        .iter()
        .enumerate()
        .filter(|(k, &w)| !candidate[*k] && w > eps)
        .map(|(_, &w)| w)
        .reduce(f64::min);
    if members.len() < 2 {
        return Ok(None);
    }
    let top = *members.last().expect("non-empty");
    let mut delta = f64::INFINITY;
    if top + 1 < spec.len() {
        delta = delta.min(spec.energy(top + 1) - spec.energy(top));
    }
    if let Some(p) = (0..spec.len()).find(|k| !members.contains(k)) {
        delta = delta.min(spec.energy(p) - spec.energy(0));
    }
    let mut eps_achieved: f64 = 0.0;
    let mut protections = BTreeSet::new();
    let mut unexplained = 0;
    for &k in &members {
        for j in 0..=k {
            eps_achieved = eps_achieved.max(mx(j, k));
            if let Some(t) = table {
                for p in couplers {
                    let reasons = zero_reasons(t, p, j, k)?;
                    if reasons.is_empty() {
                        unexplained += 1;
                    }
                    protections.extend(reasons);
                }
            }
        }
    }
    if unexplained > 0 {
        log::warn!("{unexplained} vanishing coupler element(s) not explained by the symmetry table");
    }
    log::debug!(
        "blind detection: largest accepted {eps_achieved:.2e}, smallest rejected {:?}",
        smallest_rejected
    );
    Ok(Some(BlindSubspace {
        dimension: members.len(),
        state_indices: members,
        protecting_symmetries: protections,
        delta,
        eps_achieved,
        smallest_rejected,
        unexplained_zeros: unexplained,
    }))
}
