use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::pauli::{Pauli, PauliString, PauliSum};
use super::sparse::SparseOperator;
use crate::{Error, Result};

/// Largest ring for which a Hamiltonian will be assembled.
pub const MAX_MODEL_SITES: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelFamily {
    /// `sum_n sigma_n . sigma_{n+1} + omega sigma_n . sigma_{n+2}`
    J1j2,
    /// `sum_n X_n X_{n+1} + Y_n Y_{n+1} + anisotropy Z_n Z_{n+1}`
    Xxz,
    /// `-sum_n Z_n Z_{n+1} - field sum_n X_n`
    Tfim,
    /// `sum_n (1 - X_n Z_{n+1} Z_{n+2} X_{n+3}) / 2`
    Wen,
}

/// Periodic spin-ring model description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub family: ModelFamily,
    pub n_sites: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anisotropy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<f64>,
}

impl ModelSpec {
    pub fn j1j2(n_sites: usize, omega: f64) -> Self {
        Self { family: ModelFamily::J1j2, n_sites, omega: Some(omega), anisotropy: None, field: None }
    }

    pub fn xxz(n_sites: usize, anisotropy: f64) -> Self {
        Self { family: ModelFamily::Xxz, n_sites, omega: None, anisotropy: Some(anisotropy), field: None }
    }

    pub fn tfim(n_sites: usize, field: f64) -> Self {
        Self { family: ModelFamily::Tfim, n_sites, omega: None, anisotropy: None, field: Some(field) }
    }

    pub fn wen(n_sites: usize) -> Self {
        Self { family: ModelFamily::Wen, n_sites, omega: None, anisotropy: None, field: None }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_sites;
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        let (needed, min_sites, even) = match self.family {
            ModelFamily::J1j2 => ("omega", 4, true),
            ModelFamily::Xxz => ("anisotropy", 3, false),
            ModelFamily::Tfim => ("field", 2, false),
            ModelFamily::Wen => ("", 4, false),
        };
        if n < min_sites {
            return bad(format!("{:?} needs at least {min_sites} sites, got {n}", self.family));
        }
        if even && !n.is_multiple_of(2) {
            return bad(format!("{:?} needs an even ring, got {n}", self.family));
        }
        if n > MAX_MODEL_SITES {
            return Err(Error::DimensionCeiling { dim: 1 << n.min(62), ceiling: 1 << MAX_MODEL_SITES });
        }
        for (name, value) in
            [("omega", self.omega), ("anisotropy", self.anisotropy), ("field", self.field)]
        {
            match (name == needed, value) {
                (true, None) => return bad(format!("{:?} requires '{name}'", self.family)),
                (true, Some(v)) if !v.is_finite() => return bad(format!("'{name}' must be finite")),
                (false, Some(_)) => {
                    return bad(format!("'{name}' is not a parameter of {:?}", self.family))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Stable JSON encoding used for hashing.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("model spec serializes")
    }

    /// Hex SHA-256 of the canonical JSON.
    pub fn hash_hex(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    /// Hamiltonian as a sum of Pauli strings.
    pub fn pauli_sum(&self) -> Result<PauliSum> {
        self.validate()?;
        let n = self.n_sites;
        let one = Complex64::new(1.0, 0.0);
        let pair = |a: usize, b: usize, p: Pauli| {
            PauliString::new(n, &[(a % n, p), (b % n, p)], one)
        };
        let mut sum = PauliSum::new();
        match self.family {
            ModelFamily::J1j2 => {
                let omega = self.omega.unwrap_or_default();
                for s in 0..n {
                    for p in Pauli::ALL {
                        sum.push(1.0, pair(s, s + 1, p)?);
                        if omega != 0.0 {
                            sum.push(omega, pair(s, s + 2, p)?);
                        }
                    }
                }
            }
            ModelFamily::Xxz => {
                let delta = self.anisotropy.unwrap_or_default();
                for s in 0..n {
                    sum.push(1.0, pair(s, s + 1, Pauli::X)?);
                    sum.push(1.0, pair(s, s + 1, Pauli::Y)?);
                    sum.push(delta, pair(s, s + 1, Pauli::Z)?);
                }
            }
            ModelFamily::Tfim => {
                let h = self.field.unwrap_or_default();
                for s in 0..n {
                    sum.push(-1.0, pair(s, s + 1, Pauli::Z)?);
                    sum.push(-h, PauliString::single(n, s, Pauli::X)?);
                }
            }
            ModelFamily::Wen => {
                sum.push(0.5 * n as f64, PauliString::identity(n)?);
                for s in 0..n {
                    let plaquette = PauliString::new(
                        n,
                        &[
                            (s, Pauli::X),
                            ((s + 1) % n, Pauli::Z),
                            ((s + 2) % n, Pauli::Z),
                            ((s + 3) % n, Pauli::X),
                        ],
                        one,
                    )?;
                    sum.push(-0.5, plaquette);
                }
            }
        }
        Ok(sum)
    }

    /// Plaquette stabilizers `X_n Z_{n+1} Z_{n+2} X_{n+3}` of the Wen model.
    pub fn stabilizers(&self) -> Result<Vec<PauliString>> {
        if self.family != ModelFamily::Wen {
            return Ok(Vec::new());
        }
        self.validate()?;
        let n = self.n_sites;
        (0..n)
            .map(|s| {
                PauliString::new(
                    n,
                    &[
                        (s, Pauli::X),
                        ((s + 1) % n, Pauli::Z),
                        ((s + 2) % n, Pauli::Z),
                        ((s + 3) % n, Pauli::X),
                    ],
                    Complex64::new(1.0, 0.0),
                )
            })
            .collect()
    }
}

/// Assembles the Hamiltonian of `spec` as a sparse operator.
pub fn build_hamiltonian(spec: &ModelSpec) -> Result<SparseOperator> {
    spec.pauli_sum()?.to_sparse(spec.n_sites)
}
