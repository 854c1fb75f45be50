use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const PAR_ROWS: usize = 1 << 13;

/// Complex sparse operator on the `2^N` computational basis, stored as CSR.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    n_sites: usize,
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
    hermitian: bool,
}

impl SparseOperator {
    /// Builds from raw CSR arrays. Columns within a row must be sorted and unique.
    pub(crate) fn from_csr(
        n_sites: usize,
        dim: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<Complex64>,
    ) -> Self {
        let mut op = Self { n_sites, dim, row_ptr, col_idx, values, hermitian: false };
        op.hermitian = op.hermitian_deviation() <= HERMITIAN_TOL * op.max_abs().max(1.0);
        op
    }

    /// Builds from unsorted per-row entries; duplicates are summed and exact zeros dropped.
    pub fn from_rows(n_sites: usize, mut rows: Vec<Vec<(usize, Complex64)>>) -> Self {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in rows.iter_mut() {
            row.sort_unstable_by_key(|e| e.0);
            let mut i = 0;
            while i < row.len() {
                let c = row[i].0;
                let mut v = Complex64::new(0.0, 0.0);
                while i < row.len() && row[i].0 == c {
                    v += row[i].1;
                    i += 1;
                }
                if v != Complex64::new(0.0, 0.0) {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self::from_csr(n_sites, dim, row_ptr, col_idx, values)
    }

    pub fn identity(n_sites: usize) -> Self {
        let dim = 1usize << n_sites;
        Self::from_csr(
            n_sites,
            dim,
            (0..=dim).collect(),
            (0..dim).collect(),
            vec![Complex64::new(1.0, 0.0); dim],
        )
    }

    pub fn zero(n_sites: usize) -> Self {
        let dim = 1usize << n_sites;
        Self::from_csr(n_sites, dim, vec![0; dim + 1], Vec::new(), Vec::new())
    }

    /// Permutation operator `|b> -> |perm(b)>`.
    pub fn from_permutation(n_sites: usize, perm: impl Fn(u64) -> u64) -> Self {
        let dim = 1usize << n_sites;
        let mut cols = vec![0usize; dim];
        for b in 0..dim {
            cols[perm(b as u64) as usize] = b;
        }
        Self::from_csr(
            n_sites,
            dim,
            (0..=dim).collect(),
            cols,
            vec![Complex64::new(1.0, 0.0); dim],
        )
    }

    /// Diagonal operator with entries `f(b)`.
    pub fn from_diagonal(n_sites: usize, f: impl Fn(u64) -> Complex64) -> Self {
        let dim = 1usize << n_sites;
        let rows = (0..dim).map(|b| vec![(b, f(b as u64))]).collect();
        Self::from_rows(n_sites, rows)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(i) => self.values[span.start + i],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim).map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `max |A - A^dagger|` over stored entries.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                dev = dev.max((v - self.get(c, r).conj()).norm());
            }
        }
        dev
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim, "vector dimension mismatch");
        assert_eq!(y.len(), self.dim, "vector dimension mismatch");
        let row = |r: usize| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            acc
        };
        if self.dim >= PAR_ROWS {
            y.par_iter_mut().enumerate().for_each(|(r, yr)| *yr = row(r));
        } else {
            y.iter_mut().enumerate().for_each(|(r, yr)| *yr = row(r));
        }
    }

    pub fn apply_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        self.apply(x, &mut y);
        y
    }

    /// Applies the operator to every column of `x`.
    pub fn apply_mat(&self, x: &Mat<Complex64>) -> Mat<Complex64> {
        assert_eq!(x.nrows(), self.dim, "matrix dimension mismatch");
        let mut out = Mat::<Complex64>::zeros(self.dim, x.ncols());
        let mut buf = vec![Complex64::new(0.0, 0.0); self.dim];
        for j in 0..x.ncols() {
            let col: Vec<Complex64> = x.col(j).iter().copied().collect();
            self.apply(&col, &mut buf);
            for (r, v) in buf.iter().enumerate() {
                out[(r, j)] = *v;
            }
        }
        out
    }

    pub fn to_dense(&self) -> Mat<Complex64> {
        let mut m = Mat::<Complex64>::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// Real part as a dense matrix; meaningful only when [`is_real`](Self::is_real) holds.
    pub fn to_dense_real(&self) -> Mat<f64> {
        let mut m = Mat::<f64>::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] = v.re;
            }
        }
        m
    }

    fn check_same(&self, other: &SparseOperator) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    pub fn adjoint(&self) -> SparseOperator {
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); self.dim];
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                rows[c].push((r, v.conj()));
            }
        }
        Self::from_rows(self.n_sites, rows)
    }

    pub fn scale(&self, s: Complex64) -> SparseOperator {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out.hermitian = self.hermitian && s.im == 0.0;
        out
    }

    /// `a * self + b * other`.
    pub fn axpby(&self, a: Complex64, other: &SparseOperator, b: Complex64) -> Result<SparseOperator> {
        self.check_same(other)?;
        let rows = (0..self.dim)
            .map(|r| {
                self.row(r)
                    .map(|(c, v)| (c, a * v))
                    .chain(other.row(r).map(|(c, v)| (c, b * v)))
                    .collect()
            })
            .collect();
        Ok(Self::from_rows(self.n_sites, rows))
    }

    pub fn add(&self, other: &SparseOperator) -> Result<SparseOperator> {
        let one = Complex64::new(1.0, 0.0);
        self.axpby(one, other, one)
    }

    /// Operator product `self * other`.
    pub fn matmul(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.check_same(other)?;
        let rows = (0..self.dim)
            .map(|r| {
                let mut acc = Vec::new();
                for (k, v) in self.row(r) {
                    acc.extend(other.row(k).map(|(c, w)| (c, v * w)));
                }
                acc
            })
            .collect();
        Ok(Self::from_rows(self.n_sites, rows))
    }

    /// Largest entry of the commutator `[self, other]`.
    pub fn commutator_norm(&self, other: &SparseOperator) -> Result<f64> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        Ok(ab.axpby(Complex64::new(1.0, 0.0), &ba, Complex64::new(-1.0, 0.0))?.max_abs())
    }
}
