use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sparse::SparseOperator;
use crate::{Error, Result};

/// Largest ring supported by the bitmask representation.
pub const MAX_SITES: usize = 30;

/// Single-site Pauli operator (no factor of one half).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Option<Pauli> {
        match (x, z) {
            (true, false) => Some(Pauli::X),
            (true, true) => Some(Pauli::Y),
            (false, true) => Some(Pauli::Z),
            (false, false) => None,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Tensor product of single-site Paulis times a complex phase.
///
/// Site `s` lives on bit `n_sites - 1 - s` of the computational basis index,
/// so site 0 is the most significant bit. Internally the string is stored as
/// `phase * prod_s P_s` with the Pauli factors encoded as x/z bitmasks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliString {
    n_sites: usize,
    x_mask: u64,
    z_mask: u64,
    phase: Complex64,
}

impl PauliString {
    pub fn identity(n_sites: usize) -> Result<Self> {
        check_sites(n_sites)?;
        Ok(Self { n_sites, x_mask: 0, z_mask: 0, phase: Complex64::new(1.0, 0.0) })
    }

    /// Builds `phase * prod (site, pauli)`. Repeated sites are multiplied in order.
    pub fn new(n_sites: usize, factors: &[(usize, Pauli)], phase: Complex64) -> Result<Self> {
        let mut out = Self::identity(n_sites)?;
        out.phase = phase;
        for &(site, p) in factors {
            let single = Self::single(n_sites, site, p)?;
            out = &out * &single;
        }
        Ok(out)
    }

    pub fn single(n_sites: usize, site: usize, pauli: Pauli) -> Result<Self> {
        check_sites(n_sites)?;
        if site >= n_sites {
            return Err(Error::SiteOutOfRange { site, n_sites });
        }
        let bit = 1u64 << (n_sites - 1 - site);
        let (x, z) = pauli.bits();
        Ok(Self {
            n_sites,
            x_mask: if x { bit } else { 0 },
            z_mask: if z { bit } else { 0 },
            phase: Complex64::new(1.0, 0.0),
        })
    }

    /// Parses strings such as `"XZZX"` (one letter per site, `I` for identity).
    pub fn parse(label: &str) -> Result<Self> {
        let n = label.chars().count();
        let mut factors = Vec::new();
        for (site, c) in label.chars().enumerate() {
            let p = match c {
                'X' | 'x' => Pauli::X,
                'Y' | 'y' => Pauli::Y,
                'Z' | 'z' => Pauli::Z,
                'I' | 'i' => continue,
                other => {
                    return Err(Error::InvalidArgument(format!("unknown Pauli letter '{other}'")))
                }
            };
            factors.push((site, p));
        }
        Self::new(n, &factors, Complex64::new(1.0, 0.0))
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn phase(&self) -> Complex64 {
        self.phase
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn with_phase(mut self, phase: Complex64) -> Self {
        self.phase = phase;
        self
    }

    fn bit(&self, site: usize) -> u64 {
        1u64 << (self.n_sites - 1 - site)
    }

    /// Pauli acting on `site`, or `None` for the identity.
    pub fn factor(&self, site: usize) -> Option<Pauli> {
        if site >= self.n_sites {
            return None;
        }
        let b = self.bit(site);
        Pauli::from_bits(self.x_mask & b != 0, self.z_mask & b != 0)
    }

    /// Sites carrying a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n_sites).filter(|&s| self.factor(s).is_some()).collect()
    }

    pub fn weight(&self) -> usize {
        (self.x_mask | self.z_mask).count_ones() as usize
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let s = (self.x_mask & other.z_mask).count_ones() + (self.z_mask & other.x_mask).count_ones();
        s.is_multiple_of(2)
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.im.abs() < 1e-14
    }

    /// Image of a basis state: `P |b> = amp |b'>`.
    #[inline]
    pub fn apply_to_basis(&self, b: u64) -> (u64, Complex64) {
        let y = (self.x_mask & self.z_mask).count_ones();
        let sign = if (b & self.z_mask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        (b ^ self.x_mask, self.phase * i_pow(y) * sign)
    }

    /// Computes `y = P x` for a state vector.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let dim = 1usize << self.n_sites;
        assert_eq!(x.len(), dim, "state dimension mismatch");
        assert_eq!(y.len(), dim, "state dimension mismatch");
        for (b, &xb) in x.iter().enumerate() {
            let (t, amp) = self.apply_to_basis(b as u64);
            y[t as usize] = amp * xb;
        }
    }

    /// Relabels sites with `map(site)`; `map` must be a permutation.
    pub fn permuted(&self, map: impl Fn(usize) -> usize) -> PauliString {
        let mut out = PauliString { x_mask: 0, z_mask: 0, ..self.clone() };
        for s in 0..self.n_sites {
            let t = map(s) % self.n_sites;
            let (src, dst) = (self.bit(s), self.bit(t));
            if self.x_mask & src != 0 {
                out.x_mask |= dst;
            }
            if self.z_mask & src != 0 {
                out.z_mask |= dst;
            }
        }
        out
    }

    /// Moves every factor from site `s` to `s + shift` (mod N).
    pub fn shifted(&self, shift: isize) -> PauliString {
        let n = self.n_sites as isize;
        self.permuted(|s| (s as isize + shift).rem_euclid(n) as usize)
    }

    pub fn to_sparse(&self) -> SparseOperator {
        let dim = 1usize << self.n_sites;
        let mut cols = vec![0usize; dim];
        let mut vals = vec![Complex64::new(0.0, 0.0); dim];
        for b in 0..dim {
            let (t, amp) = self.apply_to_basis(b as u64);
            // Row t has a single entry in column b.
            cols[t as usize] = b;
            vals[t as usize] = amp;
        }
        let row_ptr = (0..=dim).collect();
        SparseOperator::from_csr(self.n_sites, dim, row_ptr, cols, vals)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if (self.phase - Complex64::new(1.0, 0.0)).norm() > 1e-14 {
            write!(f, "({})", self.phase)?;
        }
        for s in 0..self.n_sites {
            match self.factor(s) {
                Some(p) => write!(f, "{p}")?,
                None => write!(f, "I")?,
            }
        }
        Ok(())
    }
}

impl Mul for &PauliString {
    type Output = PauliString;

    /// Operator product `self * rhs`. Panics if the ring sizes differ.
    fn mul(self, rhs: &PauliString) -> PauliString {
        assert_eq!(self.n_sites, rhs.n_sites, "Pauli strings on different rings");
        let x = self.x_mask ^ rhs.x_mask;
        let z = self.z_mask ^ rhs.z_mask;
        // X^x Z^z form: P = i^{|x&z|} X^x Z^z. Moving Z^{z1} past X^{x2} costs (-1)^{|z1&x2|}.
        let y1 = (self.x_mask & self.z_mask).count_ones();
        let y2 = (rhs.x_mask & rhs.z_mask).count_ones();
        let y = (x & z).count_ones();
        let swap = (self.z_mask & rhs.x_mask).count_ones();
        let k = (y1 + y2 + 4 * 64 - y) % 4;
        let sign = if swap % 2 == 1 { -1.0 } else { 1.0 };
        PauliString {
            n_sites: self.n_sites,
            x_mask: x,
            z_mask: z,
            phase: self.phase * rhs.phase * i_pow(k) * sign,
        }
    }
}

fn check_sites(n_sites: usize) -> Result<()> {
    if n_sites == 0 || n_sites > MAX_SITES {
        return Err(Error::InvalidModel(format!(
            "ring size {n_sites} outside 1..={MAX_SITES}"
        )));
    }
    Ok(())
}

/// Linear combination of Pauli strings.
#[derive(Clone, Debug, Default)]
pub struct PauliSum {
    pub terms: Vec<(Complex64, PauliString)>,
}

impl PauliSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, coeff: impl Into<Complex64>, term: PauliString) {
        self.terms.push((coeff.into(), term));
    }

    pub fn n_sites(&self) -> Option<usize> {
        self.terms.first().map(|(_, p)| p.n_sites())
    }

    pub fn to_sparse(&self, n_sites: usize) -> Result<SparseOperator> {
        let dim = 1usize << n_sites;
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); dim];
        for (c, p) in &self.terms {
            if p.n_sites() != n_sites {
                return Err(Error::DimensionMismatch { expected: n_sites, found: p.n_sites() });
            }
            for b in 0..dim {
                let (t, amp) = p.apply_to_basis(b as u64);
                rows[t as usize].push((b, c * amp));
            }
        }
        Ok(SparseOperator::from_rows(n_sites, rows))
    }
}
