use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::expm::expm;
use super::liouvillian::Liouvillian;
use crate::eigensolve::hermitian_eigen;
use crate::{Error, Result};

/// Time-evolution strategy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PropagationMethod {
    /// Spectral for Hermitian balanced generators, otherwise matrix exponential
    /// for small sectors and adaptive integration above that.
    #[default]
    Auto,
    /// Eigen-decomposition of the Hermitian balanced generator.
    Spectral,
    /// Pade matrix exponential of each sector.
    Expm,
    /// Adaptive Dormand-Prince integration.
    Adaptive,
}

#[derive(Clone, Debug)]
pub struct PropagateOptions {
    pub method: PropagationMethod,
    /// Largest sector exponentiated densely under `Auto`.
    pub expm_max_dim: usize,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        Self { method: PropagationMethod::Auto, expm_max_dim: 1024, rtol: 1e-10, atol: 1e-13 }
    }
}

enum BlockRule {
    Spectral { values: Vec<f64>, vectors: Mat<Complex64> },
    Expm,
    Adaptive,
}

/// Evolves density matrices (energy eigenbasis) under a [`Liouvillian`].
pub struct Propagator<'a> {
    lv: &'a Liouvillian,
    rules: Vec<BlockRule>,
    opts: PropagateOptions,
}

impl<'a> Propagator<'a> {
    pub fn new(lv: &'a Liouvillian, opts: PropagateOptions) -> Result<Self> {
        let mut rules = Vec::with_capacity(lv.blocks.len());
        for b in &lv.blocks {
            let n = b.matrix.nrows();
            let rule = match opts.method {
                PropagationMethod::Spectral if !lv.balanced() => {
                    return Err(Error::InvalidArgument(
                        "spectral propagation needs a detailed-balance generator".into(),
                    ))
                }
                PropagationMethod::Spectral => spectral_rule(&b.matrix)?,
                PropagationMethod::Auto if lv.balanced() => spectral_rule(&b.matrix)?,
                PropagationMethod::Auto if n <= opts.expm_max_dim => BlockRule::Expm,
                PropagationMethod::Auto | PropagationMethod::Adaptive => BlockRule::Adaptive,
                PropagationMethod::Expm => BlockRule::Expm,
            };
            rules.push(rule);
        }
        Ok(Self { lv, rules, opts })
    }

    /// `rho(t)` for initial state `rho0`.
    pub fn evolve(&self, rho0: &Mat<Complex64>, t: f64) -> Result<Mat<Complex64>> {
        let d = self.lv.levels();
        if rho0.nrows() != d || rho0.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: rho0.nrows() });
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("invalid time {t}")));
        }
        let mut out = Mat::<Complex64>::zeros(d, d);
        for (b, rule) in self.lv.blocks.iter().zip(&self.rules) {
            let mut v: Vec<Complex64> = b.pairs.iter().map(|&(i, j)| rho0[(i, j)]).collect();
            if v.iter().all(|x| *x == Complex64::new(0.0, 0.0)) {
                continue;
            }
            if self.lv.balanced() {
                for (x, &(i, j)) in v.iter_mut().zip(&b.pairs) {
                    *x /= self.lv.balance_factor(i, j);
                }
            }
            let w = match rule {
                BlockRule::Spectral { values, vectors } => {
                    let coeff = vectors.adjoint() * col(&v);
                    let scaled = Mat::from_fn(values.len(), 1, |k, _| coeff[(k, 0)] * (values[k] * t).exp());
                    to_vec(&(vectors * scaled))
                }
                BlockRule::Expm => {
                    let m = &b.matrix * faer::Scale(Complex64::new(t, 0.0));
                    to_vec(&(expm(&m) * col(&v)))
                }
                BlockRule::Adaptive => dormand_prince(&b.matrix, v, t, self.opts.rtol, self.opts.atol)?,
            };
            for (x, &(i, j)) in w.into_iter().zip(&b.pairs) {
                let f = if self.lv.balanced() { self.lv.balance_factor(i, j) } else { 1.0 };
                out[(i, j)] = x * f;
            }
        }
        Ok(out)
    }
}

fn spectral_rule(m: &Mat<Complex64>) -> Result<BlockRule> {
    let (values, vectors) = hermitian_eigen(m)?;
    Ok(BlockRule::Spectral { values, vectors })
}

fn col(v: &[Complex64]) -> Mat<Complex64> {
    Mat::from_fn(v.len(), 1, |i, _| v[i])
}

fn to_vec(m: &Mat<Complex64>) -> Vec<Complex64> {
    (0..m.nrows()).map(|i| m[(i, 0)]).collect()
}

fn matvec(m: &Mat<Complex64>, v: &[Complex64]) -> Vec<Complex64> {
    to_vec(&(m * col(v)))
}

/// Integrates `dv/dt = M v` from 0 to `t_end`.
pub(crate) fn dormand_prince(
    m: &Mat<Complex64>,
    mut y: Vec<Complex64>,
    t_end: f64,
    rtol: f64,
    atol: f64,
) -> Result<Vec<Complex64>> {
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    // Fifth-order weights are the last row of A; these are the error weights (5th minus 4th).
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let n = y.len();
    let mut t = 0.0;
    let scale_norm = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
        .max(1e-300);
    let mut h = (0.01 / scale_norm).min(t_end.max(1e-300));
    let mut k = vec![vec![Complex64::new(0.0, 0.0); n]; 7];
    k[0] = matvec(m, &y);
    while t < t_end {
        if t + h > t_end {
            h = t_end - t;
        }
        for s in 1..7 {
            let mut ys = y.clone();
            for (r, a) in A[s].iter().enumerate().take(s) {
                if *a != 0.0 {
                    ys.iter_mut().zip(&k[r]).for_each(|(yi, ki)| *yi += ki * (h * a));
                }
            }
            k[s] = matvec(m, &ys);
        }
        let mut y_new = y.clone();
        for (r, a) in A[6].iter().enumerate() {
            y_new.iter_mut().zip(&k[r]).for_each(|(yi, ki)| *yi += ki * (h * a));
        }
        let mut err: f64 = 0.0;
        for i in 0..n {
            let e: Complex64 = (0..7).map(|r| k[r][i] * (h * E[r])).sum();
            let sc = atol + rtol * y[i].norm().max(y_new[i].norm());
            err = err.max(e.norm() / sc);
        }
        if err <= 1.0 {
            t += h;
            y = y_new;
            // First-same-as-last: stage 7 was evaluated at the accepted point.
            k[0] = k[6].clone();
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < 1e-14 * t.abs().max(1.0) && t < t_end {
            return Err(Error::StepUnderflow { t });
        }
    }
    Ok(y)
}
