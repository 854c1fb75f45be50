use faer::{Mat, Side};
use num_complex::Complex64;

use super::spectral::SpectralData;
use crate::spin_basis::SparseOperator;
use crate::{Error, Result};

/// Options of [`dense_spectrum`].
#[derive(Clone, Debug)]
pub struct DenseOptions {
    /// Largest Hilbert-space dimension accepted.
    pub max_dim: usize,
    pub tol_deg: Option<f64>,
    /// Diagonalize fixed-magnetization sectors separately when `H` conserves them.
    pub block_by_magnetization: bool,
}

impl Default for DenseOptions {
    fn default() -> Self {
        Self { max_dim: 1 << 14, tol_deg: None, block_by_magnetization: true }
    }
}

pub(crate) fn check_hermitian(h: &SparseOperator) -> Result<()> {
    if !h.is_hermitian() {
        return Err(Error::NotHermitian { deviation: h.hermitian_deviation() });
    }
    Ok(())
}

/// Eigen-decomposition of a dense Hermitian matrix, ascending.
pub fn hermitian_eigen(m: &Mat<Complex64>) -> Result<(Vec<f64>, Mat<Complex64>)> {
    let eig = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::NonConvergence(format!("dense Hermitian eigensolver: {e:?}")))?;
    let vals = eig.S().column_vector().iter().map(|v| v.re).collect();
    Ok((vals, eig.U().to_owned()))
}

fn real_symmetric_eigen(m: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let eig = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::NonConvergence(format!("dense symmetric eigensolver: {e:?}")))?;
    let vals = eig.S().column_vector().iter().copied().collect();
    Ok((vals, eig.U().to_owned()))
}

fn conserves_magnetization(h: &SparseOperator) -> bool {
    (0..h.dim()).all(|r| h.row(r).all(|(c, _)| (r as u64).count_ones() == (c as u64).count_ones()))
}

/// Full spectrum of a Hermitian operator by dense diagonalization.
pub fn dense_spectrum(h: &SparseOperator, opts: &DenseOptions) -> Result<SpectralData> {
    let dim = h.dim();
    if dim > opts.max_dim {
        return Err(Error::DimensionCeiling { dim, ceiling: opts.max_dim });
    }
    check_hermitian(h)?;
    let blocks: Vec<Vec<usize>> = if opts.block_by_magnetization && conserves_magnetization(h) {
        let n = h.n_sites();
        (0..=n)
            .map(|m| (0..dim).filter(|&b| (b as u64).count_ones() as usize == m).collect())
            .collect()
    } else {
        vec![(0..dim).collect()]
    };
    let real = h.is_real();
    // (energy, block, column) for every eigenpair, plus the per-block vectors.
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(dim);
    let mut block_vecs: Vec<Mat<Complex64>> = Vec::with_capacity(blocks.len());
    for (bi, idx) in blocks.iter().enumerate() {
        let pos = |c: usize| idx.binary_search(&c).ok();
        let (vals, vecs) = if real {
            let mut m = Mat::<f64>::zeros(idx.len(), idx.len());
            for (i, &r) in idx.iter().enumerate() {
                for (c, v) in h.row(r) {
                    if let Some(j) = pos(c) {
                        m[(i, j)] = v.re;
                    }
                }
            }
            let (vals, u) = real_symmetric_eigen(&m)?;
            (vals, Mat::from_fn(u.nrows(), u.ncols(), |i, j| Complex64::new(u[(i, j)], 0.0)))
        } else {
            let mut m = Mat::<Complex64>::zeros(idx.len(), idx.len());
            for (i, &r) in idx.iter().enumerate() {
                for (c, v) in h.row(r) {
                    if let Some(j) = pos(c) {
                        m[(i, j)] = v;
                    }
                }
            }
            hermitian_eigen(&m)?
        };
        pairs.extend(vals.iter().enumerate().map(|(j, &e)| (e, bi, j)));
        block_vecs.push(vecs);
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut vectors = Mat::<Complex64>::zeros(dim, dim);
    for (col, &(_, bi, j)) in pairs.iter().enumerate() {
        for (i, &r) in blocks[bi].iter().enumerate() {
            vectors[(r, col)] = block_vecs[bi][(i, j)];
        }
    }
    let energies = pairs.iter().map(|p| p.0).collect();
    SpectralData::new(h.n_sites(), energies, vectors, true, opts.tol_deg)
}
