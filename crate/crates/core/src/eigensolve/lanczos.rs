use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::{check_hermitian, dense_spectrum, hermitian_eigen, DenseOptions};
use super::spectral::{default_tol_deg, SpectralData};
use crate::spin_basis::SparseOperator;
use crate::{Error, Result};

/// Options of [`low_spectrum`].
#[derive(Clone, Debug)]
pub struct LanczosOptions {
    /// Residual tolerance relative to `max(1, |theta|)`.
    pub tol: f64,
    pub block_size: usize,
    /// Largest Krylov basis before giving up.
    pub max_basis: usize,
    pub seed: u64,
    pub tol_deg: Option<f64>,
    /// Below this dimension the dense solver is used instead.
    pub dense_below: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { tol: 1e-11, block_size: 8, max_basis: 1200, seed: 0x5eed, tol_deg: None, dense_below: 512 }
    }
}

type Vector = Vec<Complex64>;

/// Residual tolerance of the search for missed degenerate copies.
const VERIFY_TOL: f64 = 1e-7;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn random_block(rng: &mut ChaCha8Rng, dim: usize, cols: usize) -> Mat<Complex64> {
    Mat::from_fn(dim, cols, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

/// Block classical Gram-Schmidt, applied twice, against the deflation set and
/// every basis block. Returns the summed coefficients `Q_j^dagger v` per block.
fn project_out(v: &mut Mat<Complex64>, deflate: Option<&Mat<Complex64>>, blocks: &[Mat<Complex64>]) -> Vec<Mat<Complex64>> {
    let mut coef: Vec<Mat<Complex64>> = blocks.iter().map(|q| Mat::zeros(q.ncols(), v.ncols())).collect();
    for _ in 0..2 {
        if let Some(d) = deflate {
            let c = d.adjoint() * &*v;
            *v -= d * &c;
        }
        for (q, acc) in blocks.iter().zip(coef.iter_mut()) {
            let c = q.adjoint() * &*v;
            *v -= q * &c;
            *acc += &c;
        }
    }
    coef
}

/// Orthonormalizes the columns of `v` in place, which must already be
/// orthogonal to everything in `deflate` and `blocks`. Columns that collapse
/// (an invariant subspace was reached) are replaced by fresh random directions.
fn orthonormalize(
    v: &mut Mat<Complex64>,
    deflate: Option<&Mat<Complex64>>,
    blocks: &[Mat<Complex64>],
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let dim = v.nrows();
    for i in 0..v.ncols() {
        let mut col: Vector = v.col(i).iter().copied().collect();
        let mut scale = norm(&col);
        let mut tries = 0;
        loop {
            for _ in 0..2 {
                for j in 0..i {
                    let c = dot(v.col(j).try_as_col_major().unwrap().as_slice(), &col);
                    col.iter_mut().zip(v.col(j).iter()).for_each(|(x, q)| *x -= c * q);
                }
            }
            let nv = norm(&col);
            if nv > 1e-8 * scale && nv > 0.0 {
                col.iter_mut().for_each(|x| *x /= nv);
                break;
            }
            tries += 1;
            if tries > 5 {
                return Err(Error::NonConvergence("cannot extend Krylov basis".into()));
            }
            let mut fresh = random_block(rng, dim, 1);
            project_out(&mut fresh, deflate, blocks);
            col = fresh.col(0).iter().copied().collect();
            scale = norm(&col);
        }
        v.col_mut(i).iter_mut().zip(&col).for_each(|(x, c)| *x = *c);
    }
    Ok(())
}

/// Lowest `k_req` eigenpairs of `h` restricted to the complement of `deflate`,
/// extended so the last returned level closes its cluster.
///
/// Residuals are estimated from the projected problem: with `H Q_t = Q C + R_t`
/// the Ritz pair `(theta, Q y)` has residual `|R_t y_t|`, so Ritz vectors are
/// only formed once the estimate passes.
fn block_lanczos(
    h: &SparseOperator,
    k_req: usize,
    deflate: &[Vector],
    opts: &LanczosOptions,
    seed: u64,
) -> Result<Vec<(f64, Vector)>> {
    let dim = h.dim();
    let avail = dim - deflate.len();
    let b = opts.block_size.max(1).min(avail);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let defl = (!deflate.is_empty()).then(|| Mat::from_fn(dim, deflate.len(), |i, j| deflate[j][i]));
    let defl = defl.as_ref();
    let cap = (opts.max_basis + b).min(avail);
    let mut m = Mat::<Complex64>::zeros(cap, cap);
    let mut blocks: Vec<Mat<Complex64>> = Vec::new();
    let mut offsets: Vec<usize> = Vec::new();

    let mut v = random_block(&mut rng, dim, b);
    project_out(&mut v, defl, &blocks);
    orthonormalize(&mut v, defl, &blocks, &mut rng)?;
    let mut size = 0;
    let mut next_check = (k_req + b).min(avail);

    loop {
        offsets.push(size);
        size += v.ncols();
        blocks.push(v);
        let t = blocks.len() - 1;
        let q = &blocks[t];
        let mut w = Mat::<Complex64>::zeros(dim, q.ncols());
        let mut y = vec![ZERO; dim];
        for c in 0..q.ncols() {
            h.apply(q.col(c).try_as_col_major().unwrap().as_slice(), &mut y);
            w.col_mut(c).iter_mut().zip(&y).for_each(|(a, b)| *a = *b);
        }
        let coef = project_out(&mut w, defl, &blocks);
        let ot = offsets[t];
        for (j, c) in coef.iter().enumerate() {
            let oj = offsets[j];
            for r in 0..c.nrows() {
                for col in 0..c.ncols() {
                    m[(oj + r, ot + col)] = c[(r, col)];
                    m[(ot + col, oj + r)] = c[(r, col)].conj();
                }
            }
        }
        for i in ot..size {
            m[(i, i)].im = 0.0;
        }
        let exhausted = size >= avail;

        if size >= next_check || exhausted {
            next_check = size + b.max(size / 16);
            let mm = m.submatrix(0, 0, size, size).to_owned();
            let (theta, yv) = hermitian_eigen(&mm)?;
            let tol_deg = opts.tol_deg.unwrap_or_else(|| default_tol_deg(theta[size - 1] - theta[0]));
            let mut k = k_req.min(size);
            while k < size && theta[k] - theta[k - 1] <= tol_deg {
                k += 1;
            }
            // One extra Ritz pair confirms the cluster boundary.
            let check = (k + 1).min(size);
            let gram = w.adjoint() * &w;
            let nt = w.ncols();
            let estimate_ok = exhausted
                || (0..check).all(|r| {
                    let yt = Mat::from_fn(nt, 1, |i, _| yv[(ot + i, r)]);
                    let res2 = (yt.adjoint() * &gram * &yt)[(0, 0)].re.max(0.0);
                    res2.sqrt() <= opts.tol * theta[r].abs().max(1.0)
                });
            if estimate_ok {
                let mut x = Mat::<Complex64>::zeros(dim, check);
                for (j, qb) in blocks.iter().enumerate() {
                    let yj = yv.submatrix(offsets[j], 0, qb.ncols(), check);
                    x += qb * yj;
                }
                let mut pairs = Vec::with_capacity(check);
                let mut ok = true;
                for (r, &th) in theta.iter().enumerate().take(check) {
                    let xr: Vector = x.col(r).iter().copied().collect();
                    let hx = h.apply_vec(&xr);
                    let res = hx.iter().zip(&xr).map(|(a, b)| (a - b * th).norm_sqr()).sum::<f64>().sqrt();
                    if res > opts.tol * th.abs().max(1.0) && !exhausted {
                        ok = false;
                        break;
                    }
                    pairs.push((th, xr));
                }
                if ok {
                    pairs.truncate(k);
                    return Ok(pairs);
                }
            }
        }
        if exhausted {
            return Err(Error::NonConvergence("Krylov space exhausted without convergence".into()));
        }
        if size + b > opts.max_basis {
            return Err(Error::NonConvergence(format!(
                "no convergence within {} Krylov vectors",
                opts.max_basis
            )));
        }
        let keep = w.ncols().min(avail - size);
        v = w.subcols(0, keep).to_owned();
        orthonormalize(&mut v, defl, &blocks, &mut rng)?;
    }
}

/// Lowest `k` eigenpairs of a Hermitian operator (extended to a cluster boundary).
///
/// Block Lanczos with full reorthogonalization. After convergence a second run
/// in the orthogonal complement of the found vectors checks that no copy of a
/// degenerate level was missed.
pub fn low_spectrum(h: &SparseOperator, k: usize, opts: &LanczosOptions) -> Result<SpectralData> {
    check_hermitian(h)?;
    let dim = h.dim();
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if dim <= opts.dense_below || k >= dim {
        let full = dense_spectrum(h, &DenseOptions { max_dim: usize::MAX, tol_deg: opts.tol_deg, ..Default::default() })?;
        return Ok(full.truncated(k.min(dim)));
    }
    let mut found = block_lanczos(h, k, &[], opts, opts.seed)?;
    let mut round = 1u64;
    loop {
        let top = found.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let width = top - found[0].0;
        let tol_deg = opts.tol_deg.unwrap_or_else(|| default_tol_deg(width));
        if found.len() >= dim {
            break;
        }
        let vecs: Vec<Vector> = found.iter().map(|p| p.1.clone()).collect();
        // Only the lowest energy in the complement matters here, so a loose
        // residual suffices; recovered states are recomputed at full accuracy.
        let loose = LanczosOptions { tol: opts.tol.max(VERIFY_TOL), ..opts.clone() };
        let seed = opts.seed.wrapping_add(round);
        let extra = block_lanczos(h, 1, &vecs, &loose, seed)?;
        let n_missed = extra.iter().filter(|p| p.0 <= top + tol_deg).count();
        if n_missed == 0 {
            break;
        }
        let missed: Vec<_> =
            block_lanczos(h, n_missed, &vecs, opts, seed)?.into_iter().filter(|p| p.0 <= top + tol_deg).collect();
        if missed.is_empty() {
            break;
        }
        log::debug!("lanczos verification recovered {} missed state(s)", missed.len());
        found.extend(missed);
        round += 1;
        if round > 32 {
            return Err(Error::NonConvergence("deflation verification did not settle".into()));
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    let vectors = Mat::from_fn(dim, found.len(), |i, j| found[j].1[i]);
    let energies = found.into_iter().map(|p| p.0).collect();
    let data = SpectralData::new(h.n_sites(), energies, vectors, false, opts.tol_deg)?;
    Ok(data.truncated(k))
}
