use std::ops::Range;

use faer::Mat;
use num_complex::Complex64;

use crate::spin_basis::SparseOperator;
use crate::{Error, Result};

/// Default degeneracy tolerance for a spectrum spanning `width`.
pub fn default_tol_deg(width: f64) -> f64 {
    1e-9 * width.abs().max(1.0)
}

/// Groups sorted energies into clusters; a new cluster starts when the gap to
/// the previous level exceeds `tol`.
pub fn cluster_energies(energies: &[f64], tol: f64) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=energies.len() {
        if i == energies.len() || energies[i] - energies[i - 1] > tol {
            if i > start {
                out.push(start..i);
            }
            start = i;
        }
    }
    out
}

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct SpectralData {
    n_sites: usize,
    energies: Vec<f64>,
    vectors: Mat<Complex64>,
    clusters: Vec<Range<usize>>,
    complete: bool,
    tol_deg: f64,
}

impl SpectralData {
    /// `energies` must be ascending and match the columns of `vectors`.
    pub fn new(
        n_sites: usize,
        energies: Vec<f64>,
        vectors: Mat<Complex64>,
        complete: bool,
        tol_deg: Option<f64>,
    ) -> Result<Self> {
        if vectors.ncols() != energies.len() {
            return Err(Error::DimensionMismatch { expected: energies.len(), found: vectors.ncols() });
        }
        if energies.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument("energies must be ascending".into()));
        }
        let width = match (energies.first(), energies.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        };
        let tol_deg = tol_deg.unwrap_or_else(|| default_tol_deg(width));
        let clusters = cluster_energies(&energies, tol_deg);
        Ok(Self { n_sites, energies, vectors, clusters, complete, tol_deg })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn tol_deg(&self) -> f64 {
        self.tol_deg
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy(&self, j: usize) -> f64 {
        self.energies[j]
    }

    /// `e_j - e_0`
    pub fn gap(&self, j: usize) -> f64 {
        self.energies[j] - self.energies[0]
    }

    pub fn vectors(&self) -> &Mat<Complex64> {
        &self.vectors
    }

    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        self.vectors.col(j).iter().copied().collect()
    }

    pub fn clusters(&self) -> &[Range<usize>] {
        &self.clusters
    }

    pub fn cluster_of(&self, j: usize) -> usize {
        self.clusters.partition_point(|c| c.end <= j)
    }

    pub fn degeneracy(&self, j: usize) -> usize {
        self.clusters[self.cluster_of(j)].len()
    }

    /// Smallest `k' >= k` not splitting a cluster (capped at `len`).
    pub fn cluster_boundary(&self, k: usize) -> usize {
        if k == 0 {
            return 0;
        }
        if k >= self.len() {
            return self.len();
        }
        self.clusters[self.cluster_of(k - 1)].end
    }

    /// Replaces the eigenvectors, keeping energies. Used after symmetry refinement.
    pub fn with_vectors(&self, vectors: Mat<Complex64>) -> Result<Self> {
        if vectors.nrows() != self.dim() || vectors.ncols() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: vectors.ncols() });
        }
        Ok(Self { vectors, ..self.clone() })
    }

    /// First `k` states, extended to the enclosing cluster boundary.
    pub fn truncated(&self, k: usize) -> Self {
        let k = self.cluster_boundary(k);
        let vectors = self.vectors.subcols(0, k).to_owned();
        Self {
            n_sites: self.n_sites,
            energies: self.energies[..k].to_vec(),
            vectors,
            clusters: self.clusters.iter().filter(|c| c.end <= k).cloned().collect(),
            complete: self.complete && k == self.energies.len(),
            tol_deg: self.tol_deg,
        }
    }

    /// `<e_i| op |e_j>` for all stored states.
    pub fn matrix_elements(&self, op: &SparseOperator) -> Result<Mat<Complex64>> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: op.dim() });
        }
        let ov = op.apply_mat(&self.vectors);
        Ok(self.vectors.adjoint() * ov)
    }

    /// `max_j ||H e_j - e_j e_j||`.
    pub fn max_residual(&self, h: &SparseOperator) -> Result<f64> {
        if h.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: h.dim() });
        }
        let hv = h.apply_mat(&self.vectors);
        let mut worst: f64 = 0.0;
        for j in 0..self.len() {
            let mut r = 0.0;
            for i in 0..self.dim() {
                r += (hv[(i, j)] - self.vectors[(i, j)] * self.energies[j]).norm_sqr();
            }
            worst = worst.max(r.sqrt());
        }
        Ok(worst)
    }

    /// `max |V^dagger V - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.vectors.adjoint() * &self.vectors;
        let mut worst: f64 = 0.0;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).norm());
            }
        }
        worst
    }
}
