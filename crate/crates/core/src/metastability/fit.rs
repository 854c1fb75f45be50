use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Least-squares model of a transition location against system size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SizeFit {
    /// `y = intercept + slope N`
    Linear { intercept: f64, slope: f64, rss: f64 },
    /// `y = limit + (at_zero - limit) exp(-rate N)`
    Exponential { limit: f64, at_zero: f64, rate: f64, rss: f64 },
}

impl SizeFit {
    pub fn rss(&self) -> f64 {
        match self {
            SizeFit::Linear { rss, .. } | SizeFit::Exponential { rss, .. } => *rss,
        }
    }

    fn n_params(&self) -> usize {
        match self {
            SizeFit::Linear { .. } => 2,
            SizeFit::Exponential { .. } => 3,
        }
    }

    pub fn eval(&self, n: f64) -> f64 {
        match *self {
            SizeFit::Linear { intercept, slope, .. } => intercept + slope * n,
            SizeFit::Exponential { limit, at_zero, rate, .. } => limit + (at_zero - limit) * (-rate * n).exp(),
        }
    }

    /// Residual sum of squares per degree of freedom.
    pub fn reduced_rss(&self, n_points: usize) -> f64 {
        let dof = n_points.saturating_sub(self.n_params()).max(1);
        self.rss() / dof as f64
    }
}

/// Ordinary least squares `y = a + b u`, returning `(a, b, rss)`.
fn line(u: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = u.len() as f64;
    let mu = u.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = u.iter().map(|x| (x - mu).powi(2)).sum();
    let sxy: f64 = u.iter().zip(y).map(|(x, v)| (x - mu) * (v - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mu;
    let rss = u.iter().zip(y).map(|(x, v)| (v - a - b * x).powi(2)).sum();
    (a, b, rss)
}

pub fn fit_linear(n: &[f64], y: &[f64]) -> Result<SizeFit> {
    check(n, y, 2)?;
    let (intercept, slope, rss) = line(n, y);
    Ok(SizeFit::Linear { intercept, slope, rss })
}

/// Exponential approach to a limit. The rate is profiled: for fixed rate the
/// model is linear in `exp(-rate N)`.
pub fn fit_exponential(n: &[f64], y: &[f64]) -> Result<SizeFit> {
    check(n, y, 3)?;
    let profile = |k: f64| {
        let u: Vec<f64> = n.iter().map(|x| (-k * x).exp()).collect();
        line(&u, y)
    };
    let grid: Vec<f64> = (0..=200).map(|i| 1e-3 * 10f64.powf(3.0 * i as f64 / 200.0)).collect();
    let (mut best, mut best_rss) = (grid[0], f64::INFINITY);
    for &k in &grid {
        let r = profile(k).2;
        if r < best_rss {
            best = k;
            best_rss = r;
        }
    }
    let step = 10f64.powf(3.0 / 200.0);
    let (mut a, mut b) = ((best / step).ln(), (best * step).ln());
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let f = |t: f64| profile(t.exp()).2;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..100 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    let rate = (0.5 * (a + b)).exp();
    let (limit, amp, rss) = profile(rate);
    Ok(SizeFit::Exponential { limit, at_zero: limit + amp, rate, rss })
}

/// Fits both families and keeps the one with smaller residual per degree of freedom.
pub fn fit_transition(n: &[f64], y: &[f64]) -> Result<SizeFit> {
    let lin = fit_linear(n, y)?;
    if n.len() < 4 {
        return Ok(lin);
    }
    let exp = fit_exponential(n, y)?;
    Ok(if exp.reduced_rss(n.len()) < lin.reduced_rss(n.len()) { exp } else { lin })
}

fn check(n: &[f64], y: &[f64], min: usize) -> Result<()> {
    if n.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: n.len(), found: y.len() });
    }
    if n.len() < min {
        return Err(Error::InvalidArgument(format!("need at least {min} points, got {}", n.len())));
    }
    Ok(())
}
