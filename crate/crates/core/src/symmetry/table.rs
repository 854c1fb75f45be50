use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use super::ops::Symmetry;
use crate::eigensolve::SpectralData;
use crate::spin_basis::SymmetryKind;
use crate::{Error, Result};

/// Default residual threshold for recording an eigenvalue.
pub const TOL_SYM: f64 = 1e-6;

/// Eigenvalues of one symmetry across the stored eigenstates.
#[derive(Clone, Debug)]
pub struct SymmetryColumn {
    pub symmetry: Symmetry,
    /// `None` where the state is not an eigenvector within tolerance.
    pub values: Vec<Option<Complex64>>,
    pub residuals: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct SymmetryTable {
    pub n_sites: usize,
    pub energies: Vec<f64>,
    pub columns: Vec<SymmetryColumn>,
}

fn snap(lambda: Complex64, sym: &Symmetry, n_sites: usize) -> Complex64 {
    let candidates: Vec<Complex64> = if sym.is_involution() {
        vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]
    } else {
        let k = (lambda.arg() * n_sites as f64 / (2.0 * PI)).round();
        vec![Complex64::from_polar(1.0, 2.0 * PI * k / n_sites as f64)]
    };
    candidates
        .into_iter()
        .find(|c| (c - lambda).norm() < 1e-4)
        .unwrap_or(lambda)
}

/// Formats an eigenvalue label: `+1`, `-1`, `none` or `a+bi`.
pub fn format_label(value: Option<Complex64>) -> String {
    match value {
        None => "none".into(),
        Some(v) if v.im.abs() < 1e-9 && (v.re - 1.0).abs() < 1e-9 => "+1".into(),
        Some(v) if v.im.abs() < 1e-9 && (v.re + 1.0).abs() < 1e-9 => "-1".into(),
        Some(v) => format!("{:.4}{:+.4}i", v.re, v.im),
    }
}

impl SymmetryTable {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn column(&self, sym: &Symmetry) -> Option<&SymmetryColumn> {
        self.columns.iter().find(|c| &c.symmetry == sym)
    }

    pub fn value(&self, sym: &Symmetry, j: usize) -> Option<Complex64> {
        self.column(sym).and_then(|c| c.values.get(j).copied().flatten())
    }

    /// Translation eigenvalue of state `j`, if recorded.
    pub fn translation(&self, j: usize) -> Option<Complex64> {
        self.value(&Symmetry::Lattice(SymmetryKind::Translation), j)
    }

    /// First recorded bond-reflection eigenvalue of state `j`.
    pub fn bond_reflection(&self, j: usize) -> Option<Complex64> {
        self.columns
            .iter()
            .filter(|c| matches!(c.symmetry, Symmetry::Lattice(SymmetryKind::BondReflection { .. })))
            .find_map(|c| c.values[j])
    }

    /// CSV with one row per state: index, energy, then label and residual per symmetry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,energy");
        for c in &self.columns {
            let _ = write!(out, ",lambda_{0},residual_{0}", c.symmetry.label());
        }
        out.push('\n');
        for j in 0..self.len() {
            let _ = write!(out, "{j},{:.12}", self.energies[j]);
            for c in &self.columns {
                let _ = write!(out, ",{},{:.3e}", format_label(c.values[j]), c.residuals[j]);
            }
            out.push('\n');
        }
        out
    }
}

/// Expectation `<v|U v>` and residual `||U v - lambda v||` for each state and symmetry.
pub fn symmetry_table(spec: &SpectralData, symmetries: &[Symmetry], tol_sym: f64) -> Result<SymmetryTable> {
    let n = spec.n_sites();
    let mut columns = Vec::with_capacity(symmetries.len());
    for sym in symmetries {
        let u = sym.operator(n)?;
        if u.dim() != spec.dim() {
            return Err(Error::DimensionMismatch { expected: spec.dim(), found: u.dim() });
        }
        let uv = u.apply_mat(spec.vectors());
        let mut values = Vec::with_capacity(spec.len());
        let mut residuals = Vec::with_capacity(spec.len());
        for j in 0..spec.len() {
            let v = spec.vectors().col(j);
            let lambda: Complex64 = v.iter().zip(uv.col(j).iter()).map(|(a, b)| a.conj() * b).sum();
            let res = v
                .iter()
                .zip(uv.col(j).iter())
                .map(|(a, b)| (b - lambda * a).norm_sqr())
                .sum::<f64>()
                .sqrt();
            residuals.push(res);
            values.push((res <= tol_sym).then(|| snap(lambda, sym, n)));
        }
        columns.push(SymmetryColumn { symmetry: sym.clone(), values, residuals });
    }
    Ok(SymmetryTable { n_sites: n, energies: spec.energies().to_vec(), columns })
}
