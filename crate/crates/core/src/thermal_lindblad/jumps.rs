use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;

use super::bath::{transition_rate, QChoice};
use crate::eigensolve::SpectralData;
use crate::spin_basis::PauliString;
use crate::{Error, Result};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Thermal jump operators in the energy eigenbasis of a complete spectrum.
#[derive(Clone, Debug)]
pub struct JumpOperators {
    pub beta: f64,
    /// Energies with each degenerate cluster replaced by its mean, shifted so the lowest is zero.
    pub energies: Vec<f64>,
    /// Coupler matrix elements `<e_k| S_a |e_j>`.
    pub couplers: Vec<Mat<Complex64>>,
    /// `(L_a)_{kj} = 2 pi sqrt(gamma(e_k - e_j)) <e_k| S_a |e_j>`.
    pub ops: Vec<Mat<Complex64>>,
}

pub(crate) fn snapped_energies(spec: &SpectralData) -> Vec<f64> {
    let mut e = spec.energies().to_vec();
    for c in spec.clusters() {
        let mean = e[c.clone()].iter().sum::<f64>() / c.len() as f64;
        e[c.clone()].iter_mut().for_each(|x| *x = mean);
    }
    let e0 = e[0];
    e.iter_mut().for_each(|x| *x -= e0);
    e
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidArgument(format!("inverse temperature must be non-negative, got {beta}")));
    }
    Ok(())
}

/// Builds the jump operators for the couplers `S_a`.
pub fn build_jumps(spec: &SpectralData, couplers: &[PauliString], beta: f64) -> Result<JumpOperators> {
    if !spec.is_complete() {
        return Err(Error::PartialSpectrum);
    }
    check_beta(beta)?;
    let energies = snapped_energies(spec);
    let d = spec.len();
    let couplers: Vec<Mat<Complex64>> = couplers
        .par_iter()
        .map(|p| {
            if !p.is_hermitian() {
                return Err(Error::InvalidArgument(format!("coupler {p} is not Hermitian")));
            }
            spec.matrix_elements(&p.to_sparse())
        })
        .collect::<Result<_>>()?;
    let ops = couplers
        .par_iter()
        .map(|s| {
            Mat::from_fn(d, d, |k, j| {
                s[(k, j)] * (TWO_PI * transition_rate(beta, energies[k] - energies[j]).sqrt())
            })
        })
        .collect();
    Ok(JumpOperators { beta, energies, couplers, ops })
}

impl JumpOperators {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// `A = sum_a L_a^dagger L_a`.
    pub fn decay_matrix(&self) -> Mat<Complex64> {
        let d = self.dim();
        let mut a = Mat::<Complex64>::zeros(d, d);
        for l in &self.ops {
            a += l.adjoint() * l;
        }
        a
    }

    /// Hermitian coherent term `Q`.
    pub fn q_matrix(&self, choice: QChoice) -> Mat<Complex64> {
        let d = self.dim();
        match choice {
            QChoice::Hamiltonian => {
                Mat::from_fn(d, d, |i, j| if i == j { Complex64::new(self.energies[i], 0.0) } else { Complex64::new(0.0, 0.0) })
            }
            QChoice::DetailedBalance => {
                let a = self.decay_matrix();
                Mat::from_fn(d, d, |i, j| {
                    let t = (self.beta * (self.energies[i] - self.energies[j]) / 4.0).tanh();
                    a[(i, j)] * Complex64::new(0.0, 0.5 * t)
                })
            }
        }
    }

    /// Effective non-Hermitian generator `kappa = -i Q - A / 2`.
    pub fn kappa(&self, choice: QChoice) -> Mat<Complex64> {
        let d = self.dim();
        let a = self.decay_matrix();
        match choice {
            // Closed form of -A/2 - iQ without the cancellation between the two terms.
            QChoice::DetailedBalance => Mat::from_fn(d, d, |i, k| {
                let x = self.beta * (self.energies[i] - self.energies[k]) / 4.0;
                a[(i, k)] * -logistic(-2.0 * x)
            }),
            QChoice::Hamiltonian => Mat::from_fn(d, d, |i, k| {
                let h = if i == k { Complex64::new(0.0, -self.energies[i]) } else { Complex64::new(0.0, 0.0) };
                h - a[(i, k)] * 0.5
            }),
        }
    }

    /// Balanced jump operators `2 pi S_ik / sqrt(2 cosh(beta (e_i - e_k) / 2))`.
    pub(crate) fn balanced_ops(&self) -> Vec<Mat<Complex64>> {
        let d = self.dim();
        self.couplers
            .iter()
            .map(|s| {
                Mat::from_fn(d, d, |i, k| {
                    let w = self.beta * (self.energies[i] - self.energies[k]) / 2.0;
                    s[(i, k)] * (TWO_PI * sech_sqrt(w))
                })
            })
            .collect()
    }

    /// Balanced `kappa`: `-A_ik / (2 cosh(beta (e_i - e_k) / 4))`.
    pub(crate) fn balanced_kappa(&self) -> Mat<Complex64> {
        let d = self.dim();
        let a = self.decay_matrix();
        Mat::from_fn(d, d, |i, k| {
            let x = self.beta * (self.energies[i] - self.energies[k]) / 4.0;
            a[(i, k)] * -half_sech(x)
        })
    }
}

/// `1 / (1 + exp(-x))`
fn logistic(x: f64) -> f64 {
    transition_rate(1.0, -x)
}

/// `1 / (2 cosh x)` without overflow.
fn half_sech(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    e / (1.0 + e * e)
}

/// `1 / sqrt(2 cosh x)`
fn sech_sqrt(x: f64) -> f64 {
    half_sech(x).sqrt()
}
