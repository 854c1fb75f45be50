use super::*;
use crate::eigensolve::{dense_spectrum, low_spectrum, DenseOptions, LanczosOptions, SpectralData};
use crate::spin_basis::{build_hamiltonian, single_site_paulis, ModelSpec};
use crate::symmetry::{model_symmetries, refine_by, standard_symmetries, symmetry_table, TOL_SYM};
use faer::Mat;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};

fn spectrum(model: &ModelSpec) -> SpectralData {
    let h = build_hamiltonian(model).unwrap();
    dense_spectrum(&h, &DenseOptions::default()).unwrap()
}

fn random_density(d: usize, seed: u64) -> Mat<C> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let g = Mat::from_fn(d, d, |_, _| C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let rho = &g * g.adjoint();
    let tr: C = (0..d).map(|i| rho[(i, i)]).sum();
    &rho * faer::Scale(C::new(1.0, 0.0) / tr)
}

fn max_abs(m: &Mat<C>) -> f64 {
    let mut w: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            w = w.max(m[(i, j)].norm());
        }
    }
    w
}

fn sort_c(mut v: Vec<C>) -> Vec<C> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

#[test]
fn rates_satisfy_detailed_balance() {
    assert!(transition_rate(500.0, 7.0) >= 0.0);
    assert!((transition_rate(500.0, -7.0) - 1.0).abs() < 1e-15);
    for (beta, w) in [(1.0, 0.3), (10.0, 2.0), (50.0, -4.0)] {
        let r = transition_rate(beta, w) / transition_rate(beta, -w);
        assert!((r.ln() + beta * w).abs() < 1e-9, "{beta} {w}");
        assert!(transition_rate(beta, w).is_finite());
    }
    assert!((transition_rate(3.0, 0.0) - 0.5).abs() < 1e-15);
}

#[test]
fn partial_spectrum_is_rejected() {
    let h = build_hamiltonian(&ModelSpec::j1j2(4, 0.0)).unwrap();
    let low = low_spectrum(&h, 4, &LanczosOptions::default()).unwrap();
    let c = single_site_paulis(4).unwrap();
    assert!(matches!(build_jumps(&low, &c, 1.0), Err(crate::Error::PartialSpectrum)));
}

#[test]
fn trace_preserving_and_gibbs_stationary() {
    let spec = spectrum(&ModelSpec::j1j2(4, 0.3));
    let c = single_site_paulis(4).unwrap();
    for q in [QChoice::DetailedBalance, QChoice::Hamiltonian] {
        let lv = build_liouvillian(&spec, &c, 2.0, q).unwrap();
        let rho = random_density(16, 3);
        let out = lv.apply(&rho);
        let tr: C = (0..16).map(|i| out[(i, i)]).sum();
        assert!(tr.norm() < 1e-12);
        // Hermiticity preserving.
        assert!(max_abs(&(&out - out.adjoint())) < 1e-12);
        assert!(lv.stationarity_residual(&lv.gibbs_state()) < 1e-12, "{q:?}");
    }
}

#[test]
fn dense_superoperator_matches_action() {
    let spec = spectrum(&ModelSpec::j1j2(4, 0.1));
    let c = single_site_paulis(4).unwrap();
    let lv = build_liouvillian(&spec, &c, 1.5, QChoice::DetailedBalance).unwrap();
    let big = lv.to_dense().unwrap();
    let rho = random_density(16, 9);
    let v = Mat::from_fn(256, 1, |p, _| rho[(p % 16, p / 16)]);
    let lhs = &big * &v;
    let rhs = lv.apply(&rho);
    for p in 0..256 {
        assert!((lhs[(p, 0)] - rhs[(p % 16, p / 16)]).norm() < 1e-12);
    }
}

#[test]
fn stable_kappa_matches_definition() {
    let spec = spectrum(&ModelSpec::j1j2(4, 0.4));
    let c = single_site_paulis(4).unwrap();
    let j = build_jumps(&spec, &c, 3.0).unwrap();
    let q = j.q_matrix(QChoice::DetailedBalance);
    let a = j.decay_matrix();
    let naive = q * faer::Scale(C::new(0.0, -1.0)) - a * faer::Scale(C::new(0.5, 0.0));
    assert!(max_abs(&(naive - j.kappa(QChoice::DetailedBalance))) < 1e-12);
}

#[test]
fn sectors_reproduce_full_spectrum() {
    let model = ModelSpec::j1j2(4, 0.2);
    let syms = standard_symmetries();
    let spec = refine_by(&spectrum(&model), &syms).unwrap();
    let table = symmetry_table(&spec, &syms, TOL_SYM).unwrap();
    let c = single_site_paulis(4).unwrap();
    let beta = 2.0;
    let full = build_liouvillian(&spec, &c, beta, QChoice::DetailedBalance).unwrap();
    let usable = usable_symmetries(&table, &syms, &c).unwrap();
    assert!(usable.len() >= 3);
    let split = build_liouvillian_sectors(&spec, &c, beta, QChoice::DetailedBalance, &table, &usable).unwrap();
    assert!(split.blocks.len() > 4);
    assert!(split.hermiticity_defect() < 1e-12);
    let a = sort_c(full.to_dense().unwrap().eigenvalues().unwrap());
    let b = sort_c(split.eigenvalues().unwrap());
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).norm() < 1e-8, "{x} {y}");
    }
    // Largest eigenvalue is the unique stationary state.
    assert!(b.last().unwrap().norm() < 1e-12);
    assert!(b[b.len() - 2].re < -1e-6);
}

#[test]
fn hamiltonian_variant_is_stable() {
    let model = ModelSpec::j1j2(4, 0.0);
    let syms = model_symmetries(&model).unwrap();
    let spec = refine_by(&spectrum(&model), &syms).unwrap();
    let table = symmetry_table(&spec, &syms, TOL_SYM).unwrap();
    let c = single_site_paulis(4).unwrap();
    let usable = usable_symmetries(&table, &syms, &c).unwrap();
    let lv = build_liouvillian_sectors(&spec, &c, 1.0, QChoice::Hamiltonian, &table, &usable).unwrap();
    assert!(!lv.balanced());
    for v in lv.eigenvalues().unwrap() {
        assert!(v.re < 1e-10);
    }
}

#[test]
fn expm_matches_taylor_series() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    for s in [0.1, 1.0, 8.0] {
        let a = Mat::from_fn(6, 6, |_, _| C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * s);
        // Taylor series of exp(a / 2^k) squared k times.
        let k = 10;
        let small = &a * faer::Scale(C::new(0.5f64.powi(k), 0.0));
        let mut term = Mat::<C>::identity(6, 6);
        let mut sum = Mat::<C>::identity(6, 6);
        for n in 1..30 {
            term = &term * &small * faer::Scale(C::new(1.0 / n as f64, 0.0));
            sum += &term;
        }
        for _ in 0..k {
            sum = &sum * &sum;
        }
        let e = expm(&a);
        assert!(max_abs(&(&e - &sum)) < 1e-10 * max_abs(&sum).max(1.0), "scale {s}");
    }
}

#[test]
fn propagation_methods_agree() {
    let model = ModelSpec::j1j2(4, 0.3);
    let syms = standard_symmetries();
    let spec = refine_by(&spectrum(&model), &syms).unwrap();
    let table = symmetry_table(&spec, &syms, TOL_SYM).unwrap();
    let c = single_site_paulis(4).unwrap();
    let usable = usable_symmetries(&table, &syms, &c).unwrap();
    let lv = build_liouvillian_sectors(&spec, &c, 2.0, QChoice::DetailedBalance, &table, &usable).unwrap();
    let rho0 = random_density(16, 5);
    let t = 0.05;
    let run = |method| {
        let p = Propagator::new(&lv, PropagateOptions { method, ..Default::default() }).unwrap();
        p.evolve(&rho0, t).unwrap()
    };
    let s = run(PropagationMethod::Spectral);
    let e = run(PropagationMethod::Expm);
    let a = run(PropagationMethod::Adaptive);
    assert!(max_abs(&(&s - &e)) < 1e-10);
    assert!(max_abs(&(&s - &a)) < 1e-8);
    // Long times relax to the Gibbs state.
    let p = Propagator::new(&lv, PropagateOptions::default()).unwrap();
    let late = p.evolve(&rho0, 200.0).unwrap();
    assert!(max_abs(&(&late - lv.gibbs_state())) < 1e-8);
    let f = fidelity(&[C::new(1.0, 0.0); 1].repeat(16), &pure_state(&[C::new(0.25, 0.0); 16]));
    assert!((f - 16.0).abs() < 1e-12);
}
