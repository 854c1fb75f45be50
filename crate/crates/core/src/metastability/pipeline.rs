use crate::eigensolve::{
    dense_spectrum, low_spectrum, CacheKey, DenseOptions, LanczosOptions, SpectralCache, SpectralData,
};
use crate::spin_basis::{build_hamiltonian, ModelSpec, SparseOperator};
use crate::symmetry::{model_symmetries, refine_by, symmetry_table, SymmetryTable, TOL_SYM};
use crate::Result;

/// How spectra are obtained for a model.
#[derive(Clone, Debug)]
pub struct SpectrumOptions {
    /// Largest ring diagonalized densely when only low states are needed.
    pub dense_max_sites: usize,
    /// Number of low states kept on the Lanczos path.
    pub k_low: usize,
    pub lanczos: LanczosOptions,
    pub cache: Option<SpectralCache>,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { dense_max_sites: 12, k_low: 16, lanczos: LanczosOptions::default(), cache: None }
    }
}

fn raw_spectrum(h: &SparseOperator, model: &ModelSpec, complete: bool, opts: &SpectrumOptions) -> Result<SpectralData> {
    let compute = || {
        if complete || model.n_sites <= opts.dense_max_sites {
            let full = dense_spectrum(h, &DenseOptions { max_dim: usize::MAX, ..Default::default() })?;
            Ok(if complete { full } else { full.truncated(opts.k_low) })
        } else {
            low_spectrum(h, opts.k_low, &opts.lanczos)
        }
    };
    match &opts.cache {
        Some(cache) => {
            let k = (!complete).then_some(opts.k_low);
            let key = CacheKey::new(model, k, opts.lanczos.tol, opts.lanczos.tol_deg);
            cache.get_or_compute(&key, compute)
        }
        None => compute(),
    }
}

/// Spectrum refined by the model's symmetries, with its symmetry table.
///
/// `complete` requests every eigenpair (dense path); otherwise the lowest
/// `k_low` states (extended to a cluster boundary) are computed.
pub fn refined_spectrum(
    model: &ModelSpec,
    complete: bool,
    opts: &SpectrumOptions,
) -> Result<(SpectralData, SymmetryTable)> {
    let h = build_hamiltonian(model)?;
    refined_spectrum_of(&h, model, complete, opts)
}

/// As [`refined_spectrum`] for an already assembled Hamiltonian of `model`.
pub fn refined_spectrum_of(
    h: &SparseOperator,
    model: &ModelSpec,
    complete: bool,
    opts: &SpectrumOptions,
) -> Result<(SpectralData, SymmetryTable)> {
    let spec = raw_spectrum(h, model, complete, opts)?;
    let syms = model_symmetries(model)?;
    let spec = refine_by(&spec, &syms)?;
    let table = symmetry_table(&spec, &syms, TOL_SYM)?;
    Ok((spec, table))
}
