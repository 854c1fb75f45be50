//! Blind-subspace detection, leakage bounds, Boltzmann tail diagnostics and survival times.

mod blind;
mod boltzmann;
mod fit;
mod leakage;
mod pipeline;
mod report;
mod scan;
mod survival;

pub use blind::{coupler_elements, find_blind_subspace, BlindSubspace, EPS_DETECT, K_MAX};
pub use boltzmann::{
    beta_stars, boltzmann_diagnostics, threshold_beta, BetaStar, BetaStars, BoltzmannDiagnostics, BoltzmannSums,
    BETA_MAX,
};
pub use fit::{fit_exponential, fit_linear, fit_transition, SizeFit};
pub use leakage::{eps_dfs, leakage_norms, EpsDfs, LeakageNorms};
pub use pipeline::{refined_spectrum, refined_spectrum_of, SpectrumOptions};
pub use report::{
    metastability_report, metastability_report_of, sectored_liouvillian, MetastabilityReport, ReportOptions,
    LEAKAGE_LEVEL_CEILING,
};
pub use scan::{classify_j1j2, phase_scan, PhaseClass, PhaseScan, ScanPoint, Transition, TRANSITION_TOL};
pub use survival::{departure, survival_time, SurvivalTime, DELTA_THRESHOLD};
