//! Dense and Lanczos eigensolvers producing [`SpectralData`].

mod cache;
mod dense;
mod lanczos;
mod spectral;

pub use cache::{CacheKey, SpectralCache};
pub use dense::{dense_spectrum, hermitian_eigen, DenseOptions};
pub use lanczos::{low_spectrum, LanczosOptions};
pub use spectral::{cluster_energies, default_tol_deg, SpectralData};
