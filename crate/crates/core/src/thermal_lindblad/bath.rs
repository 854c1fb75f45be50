use serde::{Deserialize, Serialize};

/// Coherent part of the Lindbladian.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum QChoice {
    /// Lamb-shift-like term making the generator satisfy KMS detailed balance.
    #[default]
    DetailedBalance,
    /// The system Hamiltonian itself.
    Hamiltonian,
}

/// Fermi-like transition rate `1 / (1 + exp(beta omega))`, without overflow.
pub fn transition_rate(beta: f64, omega: f64) -> f64 {
    let x = beta * omega;
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}
