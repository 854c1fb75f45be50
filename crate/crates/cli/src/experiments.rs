use std::collections::BTreeMap;

use blindspin_core::eigensolve::SpectralCache;
use blindspin_core::metastability::{
    beta_stars, fit_linear, fit_transition, find_blind_subspace, leakage_norms, metastability_report_of,
    phase_scan, refined_spectrum, sectored_liouvillian, survival_time, BlindSubspace, BoltzmannSums,
    ReportOptions, SizeFit, SpectrumOptions, DELTA_THRESHOLD, EPS_DETECT, K_MAX,
};
use blindspin_core::perturbation::{
    disorder_ensemble, homogeneous_field_study, sensitivity_map_for, SensitivityOptions, TauWindow,
};
use blindspin_core::spin_basis::{single_site_paulis, site_zero_paulis};
use blindspin_core::symmetry::{format_label, standard_symmetries, SymmetryTable};
use blindspin_core::thermal_lindblad::{
    build_jumps, slow_mode_count, sorted_magnitudes, PropagateOptions, Propagator, QChoice,
};
use blindspin_core::{ModelFamily, ModelSpec, Pauli, PerturbationKind, SpectralData, C64};
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliResult;
use crate::row;
use crate::table::{Axis, PlotDescriptor, ResultTable};

/// Ratio separating slow Liouvillian modes from the rest.
pub const SLOW_RATIO: f64 = 1e-3;

pub struct Context {
    pub cfg: ExperimentConfig,
    pub spectrum: SpectrumOptions,
}

impl Context {
    pub fn new(cfg: ExperimentConfig, cache: Option<SpectralCache>) -> Self {
        let spectrum = SpectrumOptions { k_low: cfg.k_low(), cache, ..Default::default() };
        Self { cfg, spectrum }
    }

    fn q(&self) -> QChoice {
        self.cfg.params.q_choice.unwrap_or_default()
    }

    fn complete(&self, m: &ModelSpec) -> CliResult<(SpectralData, SymmetryTable)> {
        Ok(refined_spectrum(m, true, &self.spectrum)?)
    }

    fn low(&self, m: &ModelSpec) -> CliResult<(SpectralData, SymmetryTable)> {
        Ok(refined_spectrum(m, false, &self.spectrum)?)
    }

    fn sens_opts(&self) -> SensitivityOptions {
        SensitivityOptions {
            window: self.cfg.params.window.unwrap_or(TauWindow::BlindPairs),
            tracking: self.cfg.params.tracking.unwrap_or_default(),
            spectrum: self.spectrum.clone(),
        }
    }
}

fn blind_of(spec: &SpectralData, table: &SymmetryTable) -> CliResult<Option<BlindSubspace>> {
    Ok(find_blind_subspace(spec, &site_zero_paulis(spec.n_sites())?, EPS_DETECT, K_MAX, Some(table))?)
}

fn omega(m: &ModelSpec) -> Option<f64> {
    match m.family {
        ModelFamily::J1j2 => m.omega,
        ModelFamily::Xxz => m.anisotropy,
        ModelFamily::Tfim => m.field,
        ModelFamily::Wen => None,
    }
}

fn par_map<T: Send, R: Send>(items: Vec<T>, f: impl Fn(T) -> CliResult<R> + Sync + Send) -> CliResult<Vec<R>> {
    items.into_par_iter().map(f).collect()
}

fn fit_cells(fit: &SizeFit) -> Vec<crate::table::Cell> {
    match *fit {
        SizeFit::Linear { intercept, slope, rss } => {
            row!["linear", intercept, slope, Option::<f64>::None, Option::<f64>::None, rss]
        }
        SizeFit::Exponential { limit, at_zero, rate, rss } => row!["exponential", at_zero, Option::<f64>::None, limit, rate, rss],
    }
}

const FIT_COLUMNS: [&str; 6] = ["family", "intercept", "slope", "limit", "rate", "rss"];

/// Runs the configured experiment and returns its tables; the first is primary.
pub fn run(ctx: &Context) -> CliResult<(Vec<ResultTable>, PlotDescriptor)> {
    match ctx.cfg.experiment {
        Experiment::Spectrum => spectrum(ctx),
        Experiment::SymmetryTable => symmetry(ctx),
        Experiment::LiouvillianSpectrum => liouvillian(ctx),
        Experiment::BlindScan => blind_scan(ctx),
        Experiment::GapVsN => gap_vs_n(ctx),
        Experiment::Boltzmann => boltzmann(ctx),
        Experiment::BetaStar => beta_star(ctx),
        Experiment::Survival => survival(ctx),
        Experiment::Sensitivity => sensitivity(ctx),
        Experiment::Disorder => disorder(ctx),
    }
}

fn plot(title: &str, kind: &str, x: Axis, y: Axis, series: &[&str]) -> PlotDescriptor {
    PlotDescriptor {
        title: title.into(),
        table: String::new(),
        kind: kind.into(),
        x,
        y,
        series_by: series.iter().map(|s| s.to_string()).collect(),
    }
}

fn spectrum(ctx: &Context) -> CliResult<(Vec<ResultTable>, PlotDescriptor)> {
    let mut t = ResultTable::new("", &["N", "param", "k", "energy", "excitation", "degeneracy"]);
    let rows = par_map(ctx.cfg.models()?, |m| {
        let (spec, _) = ctx.low(&m)?;
        Ok((0..spec.len())
            .map(|k| {
                row![m.n_sites, omega(&m), k, spec.energy(k), spec.energy(k) - spec.energy(0), spec.degeneracy(k)]
            })
            .collect::<Vec<_>>())
    })?;
    rows.into_iter().flatten().for_each(|r| t.push(r));
    let p = plot(
        "Low-lying excitation energies",
        "scatter",
        Axis::linear("param", "coupling"),
        Axis::linear("excitation", "e_k - e_0"),
        &["N", "k"],
    );
    Ok((vec![t], p))
}

fn symmetry(ctx: &Context) -> CliResult<(Vec<ResultTable>, PlotDescriptor)> {
    let syms = standard_symmetries();
    let mut cols = vec!["N", "param", "k", "excitation"];
    let labels: Vec<String> = syms.iter().map(|s| s.label()).collect();
    cols.extend(labels.iter().map(String::as_str));
    cols.push("blind");
    let mut t = ResultTable::new("", &cols);
    let rows = par_map(ctx.cfg.models()?, |m| {
        let (spec, table) = ctx.low(&m)?;
        let blind = blind_of(&spec, &table)?;
        let members = blind.map(|b| b.state_indices).unwrap_or_default();
        Ok((0..spec.len().min(K_MAX + 1))
            .map(|k| {
                let mut r = row![m.n_sites, omega(&m), k, spec.energy(k) - spec.energy(0)];
                r.extend(syms.iter().map(|s| format_label(table.value(s, k)).into()));
                r.push(members.contains(&k).into());
                r
            })
            .collect::<Vec<_>>())
    })?;
    rows.into_iter().flatten().for_each(|r| t.push(r));
    let p = plot(
        "Low spectrum by symmetry class",
        "scatter",
        Axis::linear("param", "coupling"),
        Axis::linear("excitation", "e_k - e_0"),
        &["blind", "T", "R_b0"],
    );
    Ok((vec![t], p))
}

fn liouvillian(ctx: &Context) -> CliResult<(Vec<ResultTable>, PlotDescriptor)> {
    let n_eig = ctx.cfg.params.n_eigenvalues.unwrap_or(16);
    let betas = ctx.cfg.betas()?;
    let mut points = Vec::new();
    for m in ctx.cfg.models()? {
        for &b in &betas {
            points.push((m.clone(), b));
        }
    }
    let results = par_map(points, |(m, beta)| {
        let (spec, table) = ctx.complete(&m)?;
        let lv = sectored_liouvillian(&m, &spec, &table, beta, ctx.q())?;
        let mags = sorted_magnitudes(&lv.eigenvalues()?);
        let gibbs = lv.stationary_check()?;
        Ok((m, beta, mags, gibbs, lv.hermiticity_defect()))
    })?;
    let mut spec_t = ResultTable::new("", &["N", "param", "beta", "rank", "magnitude"]);
    let mut summary =
        ResultTable::new("summary", &["N", "param", "beta", "slow_modes", "gibbs_residual", "hermiticity_defect"]);
    for (m, beta, mags, gibbs, herm) in results {
        for (r, &v) in mags.iter().take(n_eig).enumerate() {
            spec_t.push(row![m.n_sites, omega(&m), beta, r, v]);
        }
        summary.push(row![m.n_sites, omega(&m), beta, slow_mode_count(&mags, SLOW_RATIO, 16), gibbs, herm]);
    }
    let p = plot(
        "Smallest Liouvillian eigenvalue magnitudes",
        "scatter",
        Axis::linear("param", "coupling"),
        Axis::log("magnitude", "|lambda|"),
        &["rank"],
    );
    Ok((vec![spec_t, summary], p))
}

fn blind_scan(ctx: &Context) -> CliResult<(Vec<ResultTable>, PlotDescriptor)> {
    let betas = ctx.cfg.grids.beta.as_ref().map(|g| g.values()).transpose()?.unwrap_or_else(|| vec![10.0]);
    let omegas = ctx.cfg.omegas()?.unwrap_or_else(|| vec![ctx.cfg.model.omega.unwrap_or(0.0)]);
    let mut header: Vec<&str> = blindspin_core::metastability::MetastabilityReport::CSV_HEADER.to_vec();
    header.push("slow_modes");
    let mut main = ResultTable::new("", &header);
    let mut trans = ResultTable::new("transitions", &["N", "omega", "below", "above"]);
    let mut by_kind: BTreeMap<(String, String), Vec<(f64, f64)>> = BTreeMap::new();
    for n in ctx.cfg.sizes() {
        let scan = phase_scan(n, &omegas, betas[0], None, &ctx.spectrum)?;
        for t in &scan.transitions {
            trans.push(row![n, t.omega, t.below.to_string(), t.above.to_string()]);
            by_kind.entry((t.below.to_string(), t.above.to_string())).or_default().push((n as f64, t.omega));
        }
        let diagnostics = ctx.cfg.params.diagnostics.unwrap_or(n <= 12);
        let survival = ctx.cfg.params.survival.unwrap_or(false);
        let mut points = Vec::new();
        for p in &scan.points {
            for &b in &betas {
                points.push((p.clone(), b));
            }
        }
        let rows = par_map(points, |(p, beta)| {
            let m = ModelSpec::j1j2(n, p.omega);
            if !diagnostics {
                let b = p.blind.as_ref();
                let mut r = row![
                    n,
                    p.omega,
                    beta,
                    b.map_or(0, |b| b.dimension),
                    b.map_or_else(|| "none".to_string(), |b| b.protection_label()),
                    b.map(|b| b.delta)
                ];
                r.extend(std::iter::repeat_n(crate::table::Cell::Empty, header.len() - r.len()));
                return Ok(r);
            }
            let (spec, table) = ctx.complete(&m)?;
            let opts = ReportOptions {
                q_choice: ctx.q(),
                measure_survival: survival && n <= crate::config::LIOUVILLIAN_MAX_SITES,
                spectrum: ctx.spectrum.clone(),
                ..Default::default()
            };
            let rep = metastability_report_of(&m, &spec, &table, beta, &opts)?;
            let mut r: Vec<crate::table::Cell> = rep.csv_row().into_iter().map(Into::into).collect();
            let slow = if n <= crate::config::LIOUVILLIAN_MAX_SITES {
                let lv = sectored_liouvillian(&m, &spec, &table, beta, ctx.q())?;
                Some(slow_mode_count(&sorted_magnitudes(&lv.eigenvalues()?), SLOW_RATIO, 16))
            } else {
                None
            };
            r.push(slow.into());
            Ok(r)
        })?;
        rows.into_iter().for_each(|r| main.push(r));
    }
    let mut fits = ResultTable::new("fits", &[&["below", "above", "points"][..], &FIT_COLUMNS[..]].concat());
    for ((below, above), pts) in by_kind {
        if pts.len() >= 2 {
            let (ns, ws): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
            let fit = fit_transition(&ns, &ws)?;
            let mut r = row![below, above, pts.len()];
            r.extend(fit_cells(&fit));
            fits.push(r);
        }
    }
    let p = plot(
        "Blind-subspace classes",
        "heatmap",
        Axis::linear("omega", "omega"),
        Axis::linear("N", "N"),
        &["blind_dim", "symmetries"],
    );
    Ok((vec![main, trans, fits], p))
}

fn gap_vs_n(ctx: &Context) -> CliResult<(Vec<ResultTable>, PlotDescriptor)> {
    let mut t = ResultTable::new("", &["N", "param", "blind_dim", "symmetries", "Delta", "inverse_gap"]);
    let rows = par_map(ctx.cfg.models()?, |m| {
        let (spec, table) = ctx.low(&m)?;
        let b = blind_of(&spec, &table)?;
        Ok(row![
            m.n_sites,
            omega(&m),
            b.as_ref().map_or(0, |b| b.dimension),
            b.as_ref().map_or_else(|| "none".to_string(), |b| b.protection_label()),
            b.as_ref().map(|b| b.delta),
            b.as_ref().map(|b| 1.0 / b.delta)
        ])
    })?;
    rows.into_iter().for_each(|r| t.push(r));
    let p = plot("Gap above the blind subspace", "line", Axis::linear("N", "N"), Axis::linear("Delta", "Delta"), &["param"]);
    Ok((vec![t], p))
}

fn boltzmann(ctx: &Context) -> CliResult<(Vec<ResultTable>, PlotDescriptor)> {
    let betas = ctx.cfg.betas()?;
    let mut t = ResultTable::new("", &["N", "param", "beta", "j_blind", "K_X", "K_Y", "K_Z", "K", "C", "D"]);
    let rows = par_map(ctx.cfg.models()?, |m| {
        let (spec, table) = ctx.complete(&m)?;
        let Some(b) = blind_of(&spec, &table)? else {
            log::warn!("no blind subspace for {m:?}; skipped");
            return Ok(Vec::new());
        };
        let sums = BoltzmannSums::new(&spec, &site_zero_paulis(m.n_sites)?, b.top())?;
        Ok(betas
            .iter()
            .map(|&beta| {
                let d = sums.diagnostics(beta);
                row![
                    m.n_sites,
                    omega(&m),
                    beta,
                    b.top(),
                    d.k_per_coupler[0],
                    d.k_per_coupler[1],
                    d.k_per_coupler[2],
                    d.k_summed,
                    d.c,
                    d.d
                ]
            })
            .collect::<Vec<_>>())
    })?;
    rows.into_iter().flatten().for_each(|r| t.push(r));
    let p = plot("Boltzmann tail sum C", "line", Axis::linear("beta", "beta"), Axis::log("C", "C"), &["N", "param"]);
    Ok((vec![t], p))
}

fn beta_star(ctx: &Context) -> CliResult<(Vec<ResultTable>, PlotDescriptor)> {
    let targets = ctx.cfg.params.k_target.clone().unwrap_or_else(|| vec![1e-1, 1e-2, 1e-3]);
    let mut t = ResultTable::new(
        "",
        &["N", "param", "K_target", "Delta", "inverse_gap", "beta_star_C", "beta_star_K", "beta_star"],
    );
    let rows = par_map(ctx.cfg.models()?, |m| {
        let (spec, table) = ctx.complete(&m)?;
        let Some(b) = blind_of(&spec, &table)? else {
            log::warn!("no blind subspace for {m:?}; skipped");
            return Ok(Vec::new());
        };
        let sums = BoltzmannSums::new(&spec, &site_zero_paulis(m.n_sites)?, b.top())?;
        targets
            .iter()
            .map(|&k| {
                let s = beta_stars(&sums, k, b.delta, m.n_sites)?;
                Ok((
                    (omega(&m), k, m.n_sites, s.full.value()),
                    row![
                        m.n_sites,
                        omega(&m),
                        k,
                        b.delta,
                        1.0 / b.delta,
                        s.c.to_string(),
                        s.k.to_string(),
                        s.full.to_string()
                    ],
                ))
            })
            .collect::<CliResult<Vec<_>>>()
    })?;
    let mut groups: BTreeMap<(String, String), Vec<(f64, f64)>> = BTreeMap::new();
    for ((w, k, n, full), r) in rows.into_iter().flatten() {
        t.push(r);
        if let Some(v) = full {
            groups.entry((format!("{w:?}"), k.to_string())).or_default().push((n as f64, v));
        }
    }
    let mut fits = ResultTable::new("fits", &[&["param", "K_target", "points"][..], &FIT_COLUMNS[..]].concat());
    for ((w, k), pts) in groups {
        if pts.len() >= 2 {
            let (ns, vs): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
            let mut r = row![w, k, pts.len()];
            r.extend(fit_cells(&fit_linear(&ns, &vs)?));
            fits.push(r);
        }
    }
    let p = plot("Inverse temperature thresholds", "line", Axis::linear("N", "N"), Axis::linear("beta_star", "beta*"), &["param", "K_target"]);
    Ok((vec![t, fits], p))
}

fn unit(d: usize, j: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); d];
    v[j] = C64::new(1.0, 0.0);
    v
}

fn survival(ctx: &Context) -> CliResult<(Vec<ResultTable>, PlotDescriptor)> {
    let betas = ctx.cfg.betas()?;
    let delta = ctx.cfg.params.delta_threshold.unwrap_or(DELTA_THRESHOLD);
    let horizon = ctx.cfg.params.horizon.unwrap_or(1e12);
    let mut points = Vec::new();
    for m in ctx.cfg.models()? {
        for &b in &betas {
            points.push((m.clone(), b));
        }
    }
    let rows = par_map(points, |(m, beta)| {
        let (spec, table) = ctx.complete(&m)?;
        let Some(b) = blind_of(&spec, &table)? else {
            log::warn!("no blind subspace for {m:?}; skipped");
            return Ok(Vec::new());
        };
        let lv = sectored_liouvillian(&m, &spec, &table, beta, ctx.q())?;
        let prop = Propagator::new(&lv, PropagateOptions::default())?;
        let jumps = build_jumps(&spec, &single_site_paulis(m.n_sites)?, beta)?;
        let other = (1..spec.len()).find(|k| !b.state_indices.contains(k));
        let mut out = Vec::new();
        for (label, j) in [("blind", Some(b.top())), ("excited", other)] {
            let Some(j) = j else { continue };
            let psi = unit(spec.len(), j);
            let st = survival_time(&psi, &prop, delta, horizon)?;
            let bound = leakage_norms(&psi, &jumps, ctx.q())?.survival_bound(delta);
            out.push(((m.n_sites, omega(&m), label, beta, st.time), row![
                m.n_sites,
                omega(&m),
                beta,
                label,
                j,
                st.time,
                st.beyond_horizon,
                bound,
                b.delta
            ]));
        }
        Ok(out)
    })?;
    let mut t = ResultTable::new(
        "",
        &["N", "param", "beta", "state", "index", "t_survival", "beyond_horizon", "t_bound", "Delta"],
    );
    // (N, param, state) -> (beta, ln t*)
    type Key<'a> = (usize, String, &'a str);
    let mut groups: BTreeMap<Key, Vec<(f64, f64)>> = BTreeMap::new();
    for ((n, w, label, beta, time), r) in rows.into_iter().flatten() {
        t.push(r);
        groups.entry((n, format!("{w:?}"), label)).or_default().push((beta, time.ln()));
    }
    let mut fits = ResultTable::new("fits", &["N", "param", "state", "slope_log_t", "points"]);
    for ((n, w, label), pts) in groups {
        if pts.len() >= 2 {
            let (bs, ls): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
            if let SizeFit::Linear { slope, .. } = fit_linear(&bs, &ls)? {
                fits.push(row![n, w, label, slope, pts.len()]);
            }
        }
    }
    let p = plot("Survival time", "line", Axis::linear("beta", "beta"), Axis::log("t_survival", "t*"), &["N", "param", "state"]);
    Ok((vec![t, fits], p))
}

fn sensitivity(ctx: &Context) -> CliResult<(Vec<ResultTable>, PlotDescriptor)> {
    let xs = ctx.cfg.xs()?;
    let kind = ctx.cfg.params.perturbation.expect("validated");
    let homogeneous = matches!(kind, PerturbationKind::GlobalField { pauli: Pauli::Z })
        && ctx.cfg.model.family == ModelFamily::J1j2;
    let mut cols = vec!["N", "param"];
    cols.extend(blindspin_core::perturbation::SensitivityMap::CSV_HEADER);
    let mut t = ResultTable::new("", &cols);
    let mut crossings = ResultTable::new("crossings", &["N", "param", "x_crossing"]);
    for m in ctx.cfg.models()? {
        let map = if homogeneous {
            let s = homogeneous_field_study(m.omega.unwrap_or(0.0), m.n_sites, &xs, &ctx.sens_opts())?;
            crossings.push(row![m.n_sites, omega(&m), s.crossing]);
            s.map
        } else {
            sensitivity_map_for(&m, kind, &xs, &ctx.sens_opts())?
        };
        for r in map.csv_rows() {
            let mut row = row![m.n_sites, omega(&m)];
            row.extend(r.into_iter().map(Into::into));
            t.push(row);
        }
    }
    let p = plot("Sensitivity map", "rgb_grid", Axis::linear("site", "site"), Axis::linear("x", "x"), &["N", "param"]);
    let mut tables = vec![t];
    if homogeneous {
        tables.push(crossings);
    }
    Ok((tables, p))
}

fn disorder(ctx: &Context) -> CliResult<(Vec<ResultTable>, PlotDescriptor)> {
    let xs = ctx.cfg.xs()?;
    let seeds = ctx.cfg.seeds.clone().expect("validated");
    let mut t = ResultTable::new("", &["N", "param", "realization", "seed", "x", "robustness"]);
    let mut rev = ResultTable::new("revivals", &["N", "param", "realization", "revivals"]);
    for m in ctx.cfg.models()? {
        let run = disorder_ensemble(m.omega.unwrap_or(0.0), m.n_sites, &xs, seeds.realizations, seeds.master, &ctx.sens_opts())?;
        for (r, curve) in run.robustness.iter().enumerate() {
            for (x, v) in xs.iter().zip(curve) {
                t.push(row![m.n_sites, omega(&m), r, run.seeds[r], *x, *v]);
            }
        }
        for (r, k) in run.revivals().into_iter().enumerate() {
            rev.push(row![m.n_sites, omega(&m), r, k]);
        }
    }
    let p = plot("Robustness under random fields", "line", Axis::linear("x", "x"), Axis::linear("robustness", "1 - sum tau"), &["N", "param", "realization"]);
    Ok((vec![t, rev], p))
}
