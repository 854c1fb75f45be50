use std::collections::BTreeMap;

use faer::Mat;
use num_complex::Complex64;

use super::bath::QChoice;
use super::jumps::{build_jumps, JumpOperators};
use crate::eigensolve::{hermitian_eigen, SpectralData};
use crate::spin_basis::PauliString;
use crate::symmetry::{Symmetry, SymmetryTable};
use crate::{Error, Result};

/// Largest number of energy levels for which the full superoperator may be formed.
pub const DENSE_LEVEL_CEILING: usize = 1 << 6;

/// One charge sector of the Liouvillian.
#[derive(Clone, Debug)]
pub struct LiouvillianBlock {
    /// Column-stacked `(i, j)` index pairs of `|e_i><e_j|` in this sector.
    pub pairs: Vec<(usize, usize)>,
    /// Generator restricted to the sector; similarity-balanced when [`Liouvillian::balanced`] holds.
    pub matrix: Mat<Complex64>,
}

/// Thermal Lindbladian in the energy eigenbasis, split into weak-symmetry sectors.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    pub q_choice: QChoice,
    pub jumps: JumpOperators,
    pub kappa: Mat<Complex64>,
    pub blocks: Vec<LiouvillianBlock>,
    balanced: bool,
}

/// Per-state charges under symmetries whose labels are all recorded.
///
/// Returns `None` when some state lacks a label for one of the symmetries.
pub fn sector_charges(table: &SymmetryTable, symmetries: &[Symmetry]) -> Option<Vec<Vec<Complex64>>> {
    let mut out = vec![Vec::new(); table.len()];
    for sym in symmetries {
        let col = table.column(sym)?;
        for (j, v) in col.values.iter().enumerate() {
            out[j].push((*v)?);
        }
    }
    Some(out)
}

/// Whether conjugation by `sym` maps every coupler onto a multiple of a coupler in the set.
pub fn couplers_invariant(sym: &Symmetry, couplers: &[PauliString]) -> Result<bool> {
    let op_image = |p: &PauliString| -> Result<(u64, u64)> {
        Ok(match sym {
            Symmetry::Lattice(k) => {
                let q = k.conjugate(p)?;
                (q.x_mask(), q.z_mask())
            }
            Symmetry::Stabilizer { .. } => (p.x_mask(), p.z_mask()),
        })
    };
    for p in couplers {
        let img = op_image(p)?;
        if !couplers.iter().any(|q| (q.x_mask(), q.z_mask()) == img) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The symmetries usable for sector splitting: they label every state in
/// `table` and map the coupler set onto itself.
pub fn usable_symmetries(
    table: &SymmetryTable,
    candidates: &[Symmetry],
    couplers: &[PauliString],
) -> Result<Vec<Symmetry>> {
    let mut out = Vec::new();
    for s in candidates {
        let labeled = table.column(s).is_some_and(|c| c.values.iter().all(|v| v.is_some()));
        if labeled && couplers_invariant(s, couplers)? {
            out.push(s.clone());
        }
    }
    Ok(out)
}

fn charge_key(charges: &[Vec<Complex64>], i: usize, j: usize) -> Vec<i64> {
    charges[i]
        .iter()
        .zip(&charges[j])
        .map(|(a, b)| {
            let c = a * b.conj();
            // Charges are roots of unity; the rounded phase identifies them.
            (c.arg().rem_euclid(2.0 * std::f64::consts::PI) * 1e6).round() as i64 % 6_283_185
        })
        .collect()
}

impl Liouvillian {
    /// Assembles the generator, optionally split by per-state charges.
    pub fn new(jumps: JumpOperators, q_choice: QChoice, charges: Option<&[Vec<Complex64>]>) -> Result<Self> {
        let d = jumps.dim();
        let kappa = jumps.kappa(q_choice);
        let balanced = q_choice == QChoice::DetailedBalance;
        let mut sectors: BTreeMap<Vec<i64>, Vec<(usize, usize)>> = BTreeMap::new();
        for j in 0..d {
            for i in 0..d {
                let key = match charges {
                    Some(c) => {
                        if c.len() != d {
                            return Err(Error::DimensionMismatch { expected: d, found: c.len() });
                        }
                        charge_key(c, i, j)
                    }
                    None => Vec::new(),
                };
                sectors.entry(key).or_default().push((i, j));
            }
        }
        if charges.is_none() && d > DENSE_LEVEL_CEILING {
            return Err(Error::DimensionCeiling { dim: d * d, ceiling: DENSE_LEVEL_CEILING * DENSE_LEVEL_CEILING });
        }
        let (k_used, l_used) = if balanced {
            (jumps.balanced_kappa(), jumps.balanced_ops())
        } else {
            (kappa.clone(), jumps.ops.clone())
        };
        let blocks = sectors
            .into_values()
            .map(|pairs| {
                let matrix = superoperator_block(&k_used, &l_used, &pairs);
                LiouvillianBlock { pairs, matrix }
            })
            .collect();
        Ok(Self { q_choice, jumps, kappa, blocks, balanced })
    }

    /// Number of energy levels.
    pub fn levels(&self) -> usize {
        self.jumps.dim()
    }

    /// Superoperator dimension (levels squared).
    pub fn dim(&self) -> usize {
        self.levels() * self.levels()
    }

    /// Whether block matrices hold the similarity-balanced generator
    /// `D^-1 L D` with `D_(ij) = exp(-beta (e_i + e_j) / 4)`. It is Hermitian
    /// for the detailed-balance choice.
    pub fn balanced(&self) -> bool {
        self.balanced
    }

    /// `exp(-beta (e_i + e_j) / 4)` for superindex `(i, j)`.
    pub(crate) fn balance_factor(&self, i: usize, j: usize) -> f64 {
        let e = &self.jumps.energies;
        (-self.jumps.beta * (e[i] + e[j]) / 4.0).exp()
    }

    /// `kappa rho + rho kappa^dagger + sum_a L_a rho L_a^dagger`.
    pub fn apply(&self, rho: &Mat<Complex64>) -> Mat<Complex64> {
        let mut out = &self.kappa * rho + rho * self.kappa.adjoint();
        for l in &self.jumps.ops {
            out += l * rho * l.adjoint();
        }
        out
    }

    /// The unbalanced superoperator, column-stacked.
    pub fn to_dense(&self) -> Result<Mat<Complex64>> {
        let d = self.levels();
        if d > DENSE_LEVEL_CEILING {
            return Err(Error::DimensionCeiling { dim: d * d, ceiling: DENSE_LEVEL_CEILING * DENSE_LEVEL_CEILING });
        }
        let pairs: Vec<(usize, usize)> = (0..d).flat_map(|j| (0..d).map(move |i| (i, j))).collect();
        Ok(superoperator_block(&self.kappa, &self.jumps.ops, &pairs))
    }

    /// All eigenvalues. Balanced detailed-balance blocks are diagonalized as
    /// Hermitian matrices, so their eigenvalues are exactly real.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(self.dim());
        for b in &self.blocks {
            if self.balanced {
                let (vals, _) = hermitian_eigen(&b.matrix)?;
                out.extend(vals.into_iter().map(|v| Complex64::new(v, 0.0)));
            } else {
                out.extend(general_eigenvalues(&b.matrix)?);
            }
        }
        Ok(out)
    }

    /// Eigenvalues from a general (non-Hermitian) eigensolver on every block.
    pub fn eigenvalues_general(&self) -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(self.dim());
        for b in &self.blocks {
            out.extend(general_eigenvalues(&b.matrix)?);
        }
        Ok(out)
    }

    /// Eigenvalues of the unbalanced generator, sector by sector, from a general eigensolver.
    /// Nothing here relies on the similarity transform.
    pub fn eigenvalues_unbalanced(&self) -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(self.dim());
        for b in &self.blocks {
            let m = superoperator_block(&self.kappa, &self.jumps.ops, &b.pairs);
            out.extend(general_eigenvalues(&m)?);
        }
        Ok(out)
    }

    /// Largest deviation of a block from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for b in &self.blocks {
            let m = &b.matrix;
            for i in 0..m.nrows() {
                for j in 0..=i {
                    worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
                }
            }
        }
        worst
    }

    /// Gibbs state `exp(-beta H) / Z` in the energy eigenbasis.
    pub fn gibbs_state(&self) -> Mat<Complex64> {
        let e = &self.jumps.energies;
        let w: Vec<f64> = e.iter().map(|x| (-self.jumps.beta * x).exp()).collect();
        let z: f64 = w.iter().sum();
        Mat::from_fn(e.len(), e.len(), |i, j| {
            if i == j { Complex64::new(w[i] / z, 0.0) } else { Complex64::new(0.0, 0.0) }
        })
    }

    /// `||L(rho_beta)||_1` for the Gibbs state.
    pub fn stationary_check(&self) -> Result<f64> {
        trace_norm(&self.apply(&self.gibbs_state()))
    }

    /// `max |L(rho)|` entrywise.
    pub fn stationarity_residual(&self, rho: &Mat<Complex64>) -> f64 {
        let r = self.apply(rho);
        let mut worst: f64 = 0.0;
        for i in 0..r.nrows() {
            for j in 0..r.ncols() {
                worst = worst.max(r[(i, j)].norm());
            }
        }
        worst
    }
}

/// Sum of singular values.
pub fn trace_norm(m: &Mat<Complex64>) -> Result<f64> {
    let sv = m
        .singular_values()
        .map_err(|e| Error::NonConvergence(format!("singular values: {e:?}")))?;
    Ok(sv.iter().sum())
}

/// Largest singular value.
pub fn spectral_norm(m: &Mat<Complex64>) -> Result<f64> {
    let sv = m
        .singular_values()
        .map_err(|e| Error::NonConvergence(format!("singular values: {e:?}")))?;
    Ok(sv.iter().copied().fold(0.0, f64::max))
}

pub(crate) fn general_eigenvalues(m: &Mat<Complex64>) -> Result<Vec<Complex64>> {
    m.eigenvalues().map_err(|e| Error::NonConvergence(format!("general eigensolver: {e:?}")))
}

fn superoperator_block(kappa: &Mat<Complex64>, ops: &[Mat<Complex64>], pairs: &[(usize, usize)]) -> Mat<Complex64> {
    let n = pairs.len();
    Mat::from_fn(n, n, |p, q| {
        let (i, j) = pairs[p];
        let (k, l) = pairs[q];
        let mut v = Complex64::new(0.0, 0.0);
        if j == l {
            v += kappa[(i, k)];
        }
        if i == k {
            v += kappa[(j, l)].conj();
        }
        for op in ops {
            v += op[(i, k)] * op[(j, l)].conj();
        }
        v
    })
}

/// Full Lindbladian of a complete spectrum, one block.
pub fn build_liouvillian(
    spec: &SpectralData,
    couplers: &[PauliString],
    beta: f64,
    q_choice: QChoice,
) -> Result<Liouvillian> {
    Liouvillian::new(build_jumps(spec, couplers, beta)?, q_choice, None)
}

/// Lindbladian split into sectors of the given weak symmetries.
///
/// Every symmetry must map the coupler set onto itself and label every state in `table`.
pub fn build_liouvillian_sectors(
    spec: &SpectralData,
    couplers: &[PauliString],
    beta: f64,
    q_choice: QChoice,
    table: &SymmetryTable,
    symmetries: &[Symmetry],
) -> Result<Liouvillian> {
    for s in symmetries {
        if !couplers_invariant(s, couplers)? {
            return Err(Error::InvalidArgument(format!("coupler set is not invariant under {s}")));
        }
    }
    let charges = sector_charges(table, symmetries).ok_or_else(|| {
        Error::InvalidArgument("symmetry table lacks labels needed for sector splitting".into())
    })?;
    Liouvillian::new(build_jumps(spec, couplers, beta)?, q_choice, Some(&charges))
}

/// Eigenvalue magnitudes in ascending order.
pub fn sorted_magnitudes(eigs: &[Complex64]) -> Vec<f64> {
    let mut m: Vec<f64> = eigs.iter().map(|z| z.norm()).collect();
    m.sort_by(f64::total_cmp);
    m
}

/// Number of magnitudes strictly below `ratio * mags[c]`.
pub fn count_below(mags: &[f64], c: usize, ratio: f64) -> usize {
    mags.get(c).map_or(mags.len(), |&m| mags.iter().filter(|&&x| x < ratio * m).count())
}

/// Largest `c <= max` such that exactly `c` magnitudes lie below `ratio` times the
/// next one: the size of the cluster of slow modes around zero.
pub fn slow_mode_count(mags: &[f64], ratio: f64, max: usize) -> usize {
    (1..=max.min(mags.len().saturating_sub(1))).rev().find(|&c| count_below(mags, c, ratio) == c).unwrap_or(1)
}
