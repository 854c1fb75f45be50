use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::thermal_lindblad::{spectral_norm, trace_norm, JumpOperators, QChoice};
use crate::{Error, Result};

/// Norms of the pieces of `L(|psi><psi|) = T(psi) + kappa psi + psi kappa^dagger`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeakageNorms {
    /// `||L(psi)||_1`
    pub lindblad: f64,
    /// `||kappa |psi>||`
    pub kappa: f64,
    /// `||T(psi)||_1` with `T(rho) = sum_a L_a rho L_a^dagger`.
    pub jump: f64,
}

impl LeakageNorms {
    /// First-order survival time `delta / ||L(psi)||_1`.
    pub fn survival_bound(&self, delta: f64) -> f64 {
        delta / self.lindblad
    }
}

fn check_state(psi: &[Complex64], d: usize) -> Result<()> {
    if psi.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: psi.len() });
    }
    let n: f64 = psi.iter().map(|x| x.norm_sqr()).sum();
    if (n - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidArgument(format!("state is not normalized (norm^2 = {n})")));
    }
    Ok(())
}

fn col(psi: &[Complex64]) -> Mat<Complex64> {
    Mat::from_fn(psi.len(), 1, |i, _| psi[i])
}

fn vec_norm(m: &Mat<Complex64>) -> f64 {
    m.col(0).iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Leakage norms of a normalized pure state given in eigenbasis coordinates.
///
/// Works directly on the jump operators, so no superoperator is formed.
pub fn leakage_norms(psi: &[Complex64], jumps: &JumpOperators, q: QChoice) -> Result<LeakageNorms> {
    check_state(psi, jumps.dim())?;
    let v = col(psi);
    let kv = jumps.kappa(q) * &v;
    let mut t = Mat::<Complex64>::zeros(psi.len(), psi.len());
    for l in &jumps.ops {
        let lv = l * &v;
        t += &lv * lv.adjoint();
    }
    let jump = trace_norm(&t)?;
    let lindblad = trace_norm(&(&t + &kv * v.adjoint() + &v * kv.adjoint()))?;
    Ok(LeakageNorms { lindblad, kappa: vec_norm(&kv), jump })
}

/// Approximate decoherence-free-subspace measures of a state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsDfs {
    /// `||L_a psi|| / ||L_a||` per coupler.
    pub jump_ratios: Vec<f64>,
    /// Detailed balance: `||Q psi|| / ||Q||`. Hamiltonian: `||(Q - <Q>) psi|| / ||Q||`.
    pub coherent_ratio: f64,
}

impl EpsDfs {
    pub fn max_jump_ratio(&self) -> f64 {
        self.jump_ratios.iter().copied().fold(0.0, f64::max)
    }
}

pub fn eps_dfs(psi: &[Complex64], jumps: &JumpOperators, q: QChoice) -> Result<EpsDfs> {
    check_state(psi, jumps.dim())?;
    let v = col(psi);
    let jump_ratios = jumps
        .ops
        .iter()
        .map(|l| {
            let n = spectral_norm(l)?;
            Ok(if n == 0.0 { 0.0 } else { vec_norm(&(l * &v)) / n })
        })
        .collect::<Result<_>>()?;
    let qm = jumps.q_matrix(q);
    let qn = spectral_norm(&qm)?;
    let qv = &qm * &v;
    let num = match q {
        QChoice::DetailedBalance => vec_norm(&qv),
        QChoice::Hamiltonian => {
            let mean: Complex64 = psi.iter().zip(qv.col(0).iter()).map(|(a, b)| a.conj() * b).sum();
            vec_norm(&(&qv - &v * faer::Scale(mean)))
        }
    };
    Ok(EpsDfs { jump_ratios, coherent_ratio: if qn == 0.0 { 0.0 } else { num / qn } })
}
