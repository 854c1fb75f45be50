use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::blind::{find_blind_subspace, BlindSubspace, EPS_DETECT, K_MAX};
use super::boltzmann::{beta_stars, BetaStar, BoltzmannSums};
use super::leakage::leakage_norms;
use super::pipeline::{refined_spectrum, SpectrumOptions};
use super::survival::{survival_time, SurvivalTime, DELTA_THRESHOLD};
use crate::eigensolve::SpectralData;
use crate::spin_basis::{single_site_paulis, site_zero_paulis, ModelSpec, PauliString};
use crate::symmetry::{model_symmetries, SymmetryTable};
use crate::thermal_lindblad::{
    build_jumps, build_liouvillian_sectors, usable_symmetries, Liouvillian, PropagateOptions, Propagator, QChoice,
};
use crate::Result;

/// Largest number of levels for which leakage norms are evaluated.
pub const LEAKAGE_LEVEL_CEILING: usize = 256;

#[derive(Clone, Debug)]
pub struct ReportOptions {
    pub q_choice: QChoice,
    /// Target for the inverse-temperature thresholds.
    pub k_target: f64,
    pub delta_threshold: f64,
    /// Propagate the blind state to measure its survival time (small rings only).
    pub measure_survival: bool,
    pub horizon: f64,
    pub spectrum: SpectrumOptions,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            q_choice: QChoice::DetailedBalance,
            k_target: 1e-2,
            delta_threshold: DELTA_THRESHOLD,
            measure_survival: false,
            horizon: 1e12,
            spectrum: SpectrumOptions::default(),
        }
    }
}

/// Metastability diagnostics of one model at one inverse temperature.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetastabilityReport {
    pub model: ModelSpec,
    pub beta: f64,
    pub blind: Option<BlindSubspace>,
    pub leakage_norm: Option<f64>,
    pub kappa_norm: Option<f64>,
    pub survival_time_bound: Option<f64>,
    pub survival_time_measured: Option<SurvivalTime>,
    pub k: Option<f64>,
    pub c: Option<f64>,
    pub d: Option<usize>,
    pub beta_star_c: Option<BetaStar>,
    pub beta_star_k: Option<BetaStar>,
    pub beta_star: Option<BetaStar>,
}

/// Liouvillian over all single-site couplers, split by every usable model symmetry.
pub fn sectored_liouvillian(
    model: &ModelSpec,
    spec: &SpectralData,
    table: &SymmetryTable,
    beta: f64,
    q: QChoice,
) -> Result<Liouvillian> {
    let couplers = single_site_paulis(model.n_sites)?;
    let syms = usable_symmetries(table, &model_symmetries(model)?, &couplers)?;
    build_liouvillian_sectors(spec, &couplers, beta, q, table, &syms)
}

fn unit(d: usize, j: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); d];
    v[j] = Complex64::new(1.0, 0.0);
    v
}

/// Full report for one `(model, beta)`; needs a complete spectrum.
pub fn metastability_report(model: &ModelSpec, beta: f64, opts: &ReportOptions) -> Result<MetastabilityReport> {
    let (spec, table) = refined_spectrum(model, true, &opts.spectrum)?;
    metastability_report_of(model, &spec, &table, beta, opts)
}

pub fn metastability_report_of(
    model: &ModelSpec,
    spec: &SpectralData,
    table: &SymmetryTable,
    beta: f64,
    opts: &ReportOptions,
) -> Result<MetastabilityReport> {
    let n = model.n_sites;
    let site0: Vec<PauliString> = site_zero_paulis(n)?;
    let blind = find_blind_subspace(spec, &site0, EPS_DETECT, K_MAX, Some(table))?;
    let mut report = MetastabilityReport {
        model: model.clone(),
        beta,
        blind: blind.clone(),
        leakage_norm: None,
        kappa_norm: None,
        survival_time_bound: None,
        survival_time_measured: None,
        k: None,
        c: None,
        d: None,
        beta_star_c: None,
        beta_star_k: None,
        beta_star: None,
    };
    let Some(b) = blind else { return Ok(report) };
    let j = b.top();
    if j + 1 < spec.len() {
        let sums = BoltzmannSums::new(spec, &site0, j)?;
        let diag = sums.diagnostics(beta);
        let stars = beta_stars(&sums, opts.k_target, b.delta, n)?;
        report.k = Some(diag.k_summed);
        report.c = Some(diag.c);
        report.d = Some(diag.d);
        report.beta_star_c = Some(stars.c);
        report.beta_star_k = Some(stars.k);
        report.beta_star = Some(stars.full);
    }
    if spec.len() <= LEAKAGE_LEVEL_CEILING {
        let jumps = build_jumps(spec, &single_site_paulis(n)?, beta)?;
        let psi = unit(spec.len(), j);
        let norms = leakage_norms(&psi, &jumps, opts.q_choice)?;
        report.leakage_norm = Some(norms.lindblad);
        report.kappa_norm = Some(norms.kappa);
        report.survival_time_bound = Some(norms.survival_bound(opts.delta_threshold));
        if opts.measure_survival {
            let lv = sectored_liouvillian(model, spec, table, beta, opts.q_choice)?;
            let prop = Propagator::new(&lv, PropagateOptions::default())?;
            report.survival_time_measured =
                Some(survival_time(&psi, &prop, opts.delta_threshold, opts.horizon)?);
        }
    }
    Ok(report)
}

impl MetastabilityReport {
    pub const CSV_HEADER: [&'static str; 13] = [
        "N", "omega", "beta", "blind_dim", "symmetries", "Delta", "K", "C", "D", "beta_star_C", "beta_star_K",
        "beta_star", "t_survival",
    ];

    /// One CSV row matching [`Self::CSV_HEADER`]; missing values are empty.
    pub fn csv_row(&self) -> Vec<String> {
        let f = |x: Option<f64>| x.map(|v| format!("{v:.10e}")).unwrap_or_default();
        let s = |x: Option<BetaStar>| x.map(|v| v.to_string()).unwrap_or_default();
        vec![
            self.model.n_sites.to_string(),
            self.model.omega.map(|w| w.to_string()).unwrap_or_default(),
            self.beta.to_string(),
            self.blind.as_ref().map_or(0, |b| b.dimension).to_string(),
            self.blind.as_ref().map_or_else(|| "none".into(), |b| b.protection_label()),
            f(self.blind.as_ref().map(|b| b.delta)),
            f(self.k),
            f(self.c),
            self.d.map(|d| d.to_string()).unwrap_or_default(),
            s(self.beta_star_c),
            s(self.beta_star_k),
            s(self.beta_star),
            f(self.survival_time_measured.map(|t| t.time)),
        ]
    }
}
