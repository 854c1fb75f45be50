use super::*;
use crate::spin_basis::{build_perturbation, ModelSpec, Pauli, PerturbationKind};

fn z_site(site: usize) -> PerturbationKind {
    PerturbationKind::SiteField { site, pauli: Pauli::Z }
}

#[test]
fn unperturbed_blind_pairs_vanish() {
    let opts = SensitivityOptions::default();
    for omega in [-0.1, 0.6] {
        let m = sensitivity_map_for(&ModelSpec::j1j2(8, omega), z_site(4), &[0.0], &opts).unwrap();
        assert!(m.tau[0].iter().flatten().all(|&t| t <= 1e-10));
        assert_eq!(m.robustness(0), 1.0);
        assert!(m.rgb(0, 3).iter().all(|c| (c - 1.0).abs() < 1e-12));
    }
}

#[test]
fn window_must_cover_blind_subspace() {
    let opts = SensitivityOptions { window: TauWindow::AllPairs { size: 3 }, ..Default::default() };
    let r = sensitivity_map_for(&ModelSpec::j1j2(8, -0.1), z_site(0), &[0.0, 0.1], &opts);
    assert!(matches!(r, Err(crate::Error::InvalidArgument(_))));
    let opts = SensitivityOptions { window: TauWindow::AllPairs { size: 5 }, ..Default::default() };
    assert!(sensitivity_map_for(&ModelSpec::j1j2(8, -0.1), z_site(0), &[0.0, 0.1], &opts).is_ok());
    assert!(sensitivity_map_for(&ModelSpec::j1j2(8, -0.1), z_site(0), &[], &opts).is_err());
}

#[test]
fn single_site_field_leaves_reflection_axis_protected() {
    let n = 8;
    let grid = [0.0, 0.05, 0.1, 0.2];
    for omega in [-0.1, 0.6] {
        let m = sensitivity_map_for(&ModelSpec::j1j2(n, omega), z_site(n / 2), &grid, &SensitivityOptions::default())
            .unwrap();
        assert!(m.max_tau_at(0, 0.2) <= 1e-8, "omega {omega}: {}", m.max_tau_at(0, 0.2));
        assert!(m.max_tau_at(n / 2, 0.2) <= 1e-8);
        let other = (1..n).filter(|&s| s != n / 2).map(|s| m.max_tau_at(s, 0.2)).fold(0.0, f64::max);
        assert!(other > 1e-3, "omega {omega}: {other}");
    }
}

#[test]
fn two_site_field_separates_phases() {
    let n = 8;
    let kind = PerturbationKind::TwoSite { site: n / 2 - 1, pauli: Pauli::Z };
    let grid = [0.0, 0.2, 0.4];
    let opts = SensitivityOptions::default();
    let vbs = sensitivity_map_for(&ModelSpec::j1j2(n, 0.6), kind, &grid, &opts).unwrap();
    assert!(vbs.tau.iter().flatten().flatten().all(|&t| t <= 1e-8));
    let heis = sensitivity_map_for(&ModelSpec::j1j2(n, -0.1), kind, &grid, &opts).unwrap();
    assert!(heis.tau.iter().flatten().flatten().any(|&t| t > 1e-3));
}

#[test]
fn uniform_field_crossing() {
    let opts = SensitivityOptions::default();
    let none = homogeneous_field_study(-0.1, 8, &[0.0], &opts).unwrap();
    assert_eq!(none.crossing, None);
    let grid: Vec<f64> = (0..=30).map(|i| 0.05 * i as f64).collect();
    let s = homogeneous_field_study(-0.1, 8, &grid, &opts).unwrap();
    let x = s.crossing.expect("crossing");
    for (xi, &g) in grid.iter().enumerate() {
        if g < x - CROSSING_TOL {
            assert!(s.map.tau[xi].iter().flatten().all(|&t| t <= 1e-8), "x {g}");
        }
    }
}

#[test]
fn disorder_runs_are_reproducible() {
    let grid = [0.0, 0.1, 0.3];
    let opts = SensitivityOptions::default();
    let a = disorder_ensemble(0.6, 6, &grid, 3, 42, &opts).unwrap();
    let b = disorder_ensemble(0.6, 6, &grid, 3, 42, &opts).unwrap();
    assert_eq!(a.robustness, b.robustness);
    assert_eq!(a.seeds, b.seeds);
    for curve in &a.robustness {
        assert_eq!(curve[0], 1.0);
    }
    let c = disorder_ensemble(0.6, 8, &grid[..1], 3, 42, &opts).unwrap();
    for (short, long) in a.coefficients.iter().zip(&c.coefficients) {
        assert_eq!(short[..], long[..6]);
    }
    assert_eq!(a.csv_rows().len(), 9);
    assert!(disorder_ensemble(0.6, 6, &grid, 0, 1, &opts).is_err());
}

#[test]
fn raw_tracking_keeps_ordering() {
    let opts = SensitivityOptions { tracking: Tracking::Raw, ..Default::default() };
    let h = |x: f64| build_perturbation(z_site(2), x, 6);
    let m = sensitivity_map(&ModelSpec::j1j2(6, 0.3), h, &[0.0, 0.2, 0.4], &opts).unwrap();
    assert!(m.ranks.iter().all(|r| *r == m.blind_indices));
    assert_eq!(m.csv_rows().len(), 18);
}
