//! Thermal Lindbladian of a weakly coupled bath in the energy eigenbasis.

mod bath;
mod expm;
mod jumps;
mod liouvillian;
mod propagate;

pub use bath::{transition_rate, QChoice};
pub use expm::expm;
pub use jumps::{build_jumps, JumpOperators};
pub use liouvillian::{
    build_liouvillian, build_liouvillian_sectors, count_below, couplers_invariant, slow_mode_count, sorted_magnitudes, sector_charges, spectral_norm, trace_norm, usable_symmetries, Liouvillian,
    LiouvillianBlock, DENSE_LEVEL_CEILING,
};
pub use propagate::{PropagateOptions, PropagationMethod, Propagator};

use faer::Mat;
use num_complex::Complex64;

/// `|psi><psi|` for a state given in eigenbasis coordinates.
pub fn pure_state(psi: &[Complex64]) -> Mat<Complex64> {
    Mat::from_fn(psi.len(), psi.len(), |i, j| psi[i] * psi[j].conj())
}

/// `<psi| rho |psi>`.
pub fn fidelity(psi: &[Complex64], rho: &Mat<Complex64>) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..psi.len() {
        for j in 0..psi.len() {
            acc += psi[i].conj() * rho[(i, j)] * psi[j];
        }
    }
    acc.re
}

#[cfg(test)]
mod tests;
