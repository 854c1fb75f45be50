use faer::Mat;
use num_complex::Complex64;

use crate::eigensolve::{hermitian_eigen, SpectralData};
use crate::spin_basis::SparseOperator;
use crate::{Error, Result};

/// Largest tolerated `||U B - B (B^dagger U B)||` for `U` to count as a symmetry of a cluster.
pub const LEAKAGE_TOL: f64 = 1e-6;
const GROUP_TOL: f64 = 1e-6;
// Mixing weight for the anti-Hermitian part; any irrational value separates
// distinct eigenvalues of a normal matrix.
const MIX: f64 = std::f64::consts::SQRT_2;

fn max_col_norm(m: &Mat<Complex64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.col(j).iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

/// Eigen-decomposition of a normal matrix via a Hermitian combination.
fn normal_eigen(m: &Mat<Complex64>) -> Result<(Vec<Complex64>, Mat<Complex64>)> {
    let half = Complex64::new(0.5, 0.0);
    let k = Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        let herm = (m[(i, j)] + m[(j, i)].conj()) * half;
        let anti = (m[(i, j)] - m[(j, i)].conj()) * Complex64::new(0.0, -0.5 * MIX);
        herm + anti
    });
    let (_, w) = hermitian_eigen(&k)?;
    let lambdas = (0..w.ncols())
        .map(|c| {
            let col = w.col(c);
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    acc += col[i].conj() * m[(i, j)] * col[j];
                }
            }
            acc
        })
        .collect();
    Ok((lambdas, w))
}

/// Projected matrix `B^dagger U B` and the leakage of `U B` out of span `B`.
fn project(u: &SparseOperator, b: &Mat<Complex64>) -> (Mat<Complex64>, f64) {
    let ub = u.apply_mat(b);
    let m = b.adjoint() * &ub;
    let leak = max_col_norm(&(&ub - b * &m));
    (m, leak)
}

fn refine_block(b: Mat<Complex64>, chain: &[&SparseOperator], strict: Option<usize>) -> Result<Mat<Complex64>> {
    if b.ncols() <= 1 || chain.is_empty() {
        return Ok(b);
    }
    let (m, leak) = project(chain[0], &b);
    if leak > LEAKAGE_TOL {
        if let Some(cluster) = strict {
            return Err(Error::NotCommuting { cluster, leakage: leak });
        }
        log::debug!("symmetry leaks out of a degenerate block ({leak:.2e}); skipped");
        return refine_block(b, &chain[1..], None);
    }
    let (lambdas, w) = normal_eigen(&m)?;
    let rotated = &b * &w;
    let mut out = Mat::<Complex64>::zeros(b.nrows(), b.ncols());
    let mut start = 0;
    let mut col = 0;
    while start < lambdas.len() {
        let mut end = start + 1;
        while end < lambdas.len() && (lambdas[end] - lambdas[start]).norm() < GROUP_TOL {
            end += 1;
        }
        let group = rotated.subcols(start, end - start).to_owned();
        let refined = refine_block(group, &chain[1..], None)?;
        for j in 0..refined.ncols() {
            out.col_mut(col + j).copy_from(refined.col(j));
        }
        col += refined.ncols();
        start = end;
    }
    Ok(out)
}

/// Rotates each degenerate cluster into simultaneous eigenvectors of the chain.
///
/// The first operator must preserve every cluster, otherwise
/// [`Error::NotCommuting`] is returned. Later operators are applied inside the
/// groups left by the previous ones and are skipped where they do not
/// preserve a group.
pub fn refine_with(spec: &SpectralData, chain: &[&SparseOperator]) -> Result<SpectralData> {
    for op in chain {
        if op.dim() != spec.dim() {
            return Err(Error::DimensionMismatch { expected: spec.dim(), found: op.dim() });
        }
    }
    let mut vectors = spec.vectors().clone();
    for (ci, range) in spec.clusters().iter().enumerate() {
        let block = spec.vectors().subcols(range.start, range.len()).to_owned();
        let refined = if range.len() == 1 {
            // Nothing to rotate, but the first operator must still map the state onto itself.
            if let Some(first) = chain.first() {
                let (_, leak) = project(first, &block);
                if leak > LEAKAGE_TOL {
                    return Err(Error::NotCommuting { cluster: ci, leakage: leak });
                }
            }
            block
        } else {
            refine_block(block, chain, Some(ci))?
        };
        for j in 0..range.len() {
            vectors.col_mut(range.start + j).copy_from(refined.col(j));
        }
    }
    spec.with_vectors(vectors)
}

/// Rotates degenerate clusters into eigenvectors of the translation `t`.
pub fn refine_degenerate(spec: &SpectralData, t: &SparseOperator) -> Result<SpectralData> {
    refine_with(spec, &[t])
}
