use super::*;
use faer::Mat;
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn single(p: Option<Pauli>) -> Mat<C> {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let data = match p {
        None => [[one, z], [z, one]],
        Some(Pauli::X) => [[z, one], [one, z]],
        Some(Pauli::Y) => [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]],
        Some(Pauli::Z) => [[one, z], [z, -one]],
    };
    Mat::from_fn(2, 2, |i, j| data[i][j])
}

fn kron(a: &Mat<C>, b: &Mat<C>) -> Mat<C> {
    Mat::from_fn(a.nrows() * b.nrows(), a.ncols() * b.ncols(), |i, j| {
        a[(i / b.nrows(), j / b.ncols())] * b[(i % b.nrows(), j % b.ncols())]
    })
}

/// Kronecker-product oracle, site 0 leftmost.
fn oracle(n: usize, factors: &[(usize, Pauli)]) -> Mat<C> {
    let mut m = Mat::from_fn(1, 1, |_, _| c(1.0, 0.0));
    for s in 0..n {
        let mut f = single(None);
        for &(site, p) in factors.iter().filter(|(site, _)| *site == s) {
            let _ = site;
            f = &f * &single(Some(p));
        }
        m = kron(&m, &f);
    }
    m
}

fn max_diff(a: &Mat<C>, b: &Mat<C>) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            d = d.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    d
}

#[test]
fn pauli_strings_match_kronecker_products() {
    let n = 4;
    let cases: Vec<Vec<(usize, Pauli)>> = vec![
        vec![(0, Pauli::X)],
        vec![(3, Pauli::Y)],
        vec![(1, Pauli::Z), (2, Pauli::Y)],
        vec![(0, Pauli::Y), (1, Pauli::Y), (3, Pauli::X)],
    ];
    for f in cases {
        let p = PauliString::new(n, &f, c(1.0, 0.0)).unwrap();
        assert!(max_diff(&p.to_sparse().to_dense(), &oracle(n, &f)) < 1e-15, "{p}");
    }
}

#[test]
fn single_site_algebra() {
    let n = 3;
    let x = PauliString::single(n, 1, Pauli::X).unwrap();
    let y = PauliString::single(n, 1, Pauli::Y).unwrap();
    let z = PauliString::single(n, 1, Pauli::Z).unwrap();
    let xy = &x * &y;
    assert_eq!(xy.factor(1), Some(Pauli::Z));
    assert!((xy.phase() - c(0.0, 1.0)).norm() < 1e-15);
    let xx = &x * &x;
    assert_eq!(xx.weight(), 0);
    assert!((xx.phase() - c(1.0, 0.0)).norm() < 1e-15);
    assert!(!x.commutes_with(&z));
    let z0 = PauliString::single(n, 0, Pauli::Z).unwrap();
    assert!(x.commutes_with(&z0));
}

#[test]
fn out_of_range_site_is_rejected() {
    assert!(matches!(
        PauliString::single(4, 4, Pauli::X),
        Err(crate::Error::SiteOutOfRange { site: 4, n_sites: 4 })
    ));
}

#[test]
fn parse_round_trips() {
    let p = PauliString::parse("XIZY").unwrap();
    assert_eq!(p.to_string(), "XIZY");
    assert_eq!(p.support(), vec![0, 2, 3]);
}

#[test]
fn j1j2_matches_kronecker_oracle() {
    let n = 4;
    let omega = 0.37;
    let h = build_hamiltonian(&ModelSpec::j1j2(n, omega)).unwrap();
    let mut o = Mat::<C>::zeros(16, 16);
    for s in 0..n {
        for p in Pauli::ALL {
            o += oracle(n, &[(s, p), ((s + 1) % n, p)]);
            o += oracle(n, &[(s, p), ((s + 2) % n, p)]) * faer::Scale(c(omega, 0.0));
        }
    }
    assert!(max_diff(&h.to_dense(), &o) < 1e-13);
    assert!(h.is_hermitian());
    assert!(h.is_real());
}

#[test]
fn wen_ground_space_is_twofold() {
    for n in [4, 5, 6, 7] {
        let h = build_hamiltonian(&ModelSpec::wen(n)).unwrap().to_dense();
        let e = h.self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
        let zeros = e.iter().filter(|v| v.abs() < 1e-9).count();
        assert_eq!(zeros, 2, "N={n}");
        assert!(e[0] > -1e-9);
    }
}

#[test]
fn model_validation() {
    assert!(ModelSpec::j1j2(5, 0.1).validate().is_err());
    let mut s = ModelSpec::j1j2(6, 0.1);
    s.field = Some(1.0);
    assert!(s.validate().is_err());
    let s: Result<ModelSpec, _> =
        serde_json::from_str(r#"{"family":"j1j2","n_sites":6,"omega":0.1,"extra":1}"#);
    assert!(s.is_err());
    let s: ModelSpec = serde_json::from_str(r#"{"family":"tfim","n_sites":6,"field":0.2}"#).unwrap();
    assert_eq!(s, ModelSpec::tfim(6, 0.2));
    assert_eq!(s.hash_hex(), ModelSpec::tfim(6, 0.2).hash_hex());
    assert_ne!(s.hash_hex(), ModelSpec::tfim(6, 0.3).hash_hex());
}

#[test]
fn symmetries_commute_with_j1j2() {
    let n = 6;
    let h = build_hamiltonian(&ModelSpec::j1j2(n, 0.3)).unwrap();
    for kind in [
        SymmetryKind::ChargeX,
        SymmetryKind::PhaseZ,
        SymmetryKind::Translation,
        SymmetryKind::BondReflection { axis: 0 },
        SymmetryKind::SiteReflection { axis: 2 },
    ] {
        let u = build_symmetry(kind, n).unwrap();
        assert!(u.commutator_norm(&h).unwrap() < 1e-12, "{kind:?}");
    }
}

#[test]
fn translation_and_reflection_conventions() {
    let n = 6;
    let t = build_symmetry(SymmetryKind::Translation, n).unwrap().to_dense();
    let r = build_symmetry(SymmetryKind::BondReflection { axis: 2 }, n).unwrap().to_dense();
    for site in 0..n {
        let p = PauliString::single(n, site, Pauli::Y).unwrap();
        let next = PauliString::single(n, (site + 1) % n, Pauli::Y).unwrap().to_sparse().to_dense();
        let conj = t.adjoint() * p.to_sparse().to_dense() * &t;
        assert!(max_diff(&conj, &next) < 1e-15);
    }
    // R_a swaps a-1 and a.
    let p1 = PauliString::single(n, 1, Pauli::X).unwrap().to_sparse().to_dense();
    let p2 = PauliString::single(n, 2, Pauli::X).unwrap().to_sparse().to_dense();
    assert!(max_diff(&(&r * &p1 * r.adjoint()), &p2) < 1e-15);
    // R_a T fixes P_a.
    let u = &r * &t;
    assert!(max_diff(&(&u * &p2 * u.adjoint()), &p2) < 1e-15);
    assert!(matches!(
        build_symmetry(SymmetryKind::SiteReflection { axis: 9 }, n),
        Err(crate::Error::InvalidAxis { .. })
    ));
}

#[test]
fn conjugate_agrees_with_matrices() {
    let n = 5;
    let p = PauliString::parse("XYZIZ").unwrap();
    let pd = p.to_sparse().to_dense();
    for kind in [
        SymmetryKind::ChargeX,
        SymmetryKind::PhaseZ,
        SymmetryKind::Translation,
        SymmetryKind::BondReflection { axis: 1 },
        SymmetryKind::SiteReflection { axis: 3 },
    ] {
        let u = build_symmetry(kind, n).unwrap().to_dense();
        let lhs = &u * &pd * u.adjoint();
        let rhs = kind.conjugate(&p).unwrap().to_sparse().to_dense();
        assert!(max_diff(&lhs, &rhs) < 1e-15, "{kind:?}");
    }
}

#[test]
fn perturbations() {
    let n = 4;
    let v = build_perturbation(PerturbationKind::TwoSite { site: 3, pauli: Pauli::Z }, 0.5, n)
        .unwrap()
        .to_dense();
    let o = oracle(n, &[(3, Pauli::Z), (0, Pauli::Z)]) * faer::Scale(c(0.5, 0.0));
    assert!(max_diff(&v, &o) < 1e-15);
    assert!(build_perturbation(PerturbationKind::SiteField { site: 4, pauli: Pauli::Z }, 1.0, n).is_err());
    let a = disorder_strengths(7, 6);
    assert_eq!(a, disorder_strengths(7, 6));
    assert_eq!(&disorder_strengths(7, 8)[..6], &a[..]);
    assert_ne!(a, disorder_strengths(8, 6));
}

#[test]
fn disorder_strengths_are_standard_normal() {
    let xs: Vec<f64> = (0..400).flat_map(|s| disorder_strengths(s, 25)).collect();
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
    assert!(mean.abs() < 0.05, "{mean}");
    assert!((var - 1.0).abs() < 0.06, "{var}");
}

fn arb_string(n: usize) -> impl Strategy<Value = PauliString> {
    proptest::collection::vec(0u8..4, n).prop_map(move |v| {
        let f: Vec<(usize, Pauli)> = v
            .iter()
            .enumerate()
            .filter_map(|(s, &k)| match k {
                1 => Some((s, Pauli::X)),
                2 => Some((s, Pauli::Y)),
                3 => Some((s, Pauli::Z)),
                _ => None,
            })
            .collect();
        PauliString::new(n, &f, C::new(1.0, 0.0)).unwrap()
    })
}

proptest! {
    #[test]
    fn product_matches_matrix_product(a in arb_string(4), b in arb_string(4)) {
        let ab = (&a * &b).to_sparse().to_dense();
        let m = a.to_sparse().to_dense() * b.to_sparse().to_dense();
        prop_assert!(max_diff(&ab, &m) < 1e-14);
    }

    #[test]
    fn commutation_flag_matches_matrices(a in arb_string(4), b in arb_string(4)) {
        let ad = a.to_sparse().to_dense();
        let bd = b.to_sparse().to_dense();
        let comm = &ad * &bd - &bd * &ad;
        let zero = max_diff(&comm, &Mat::zeros(16, 16)) < 1e-14;
        prop_assert_eq!(zero, a.commutes_with(&b));
    }

    #[test]
    fn strings_are_unitary_and_hermitian(a in arb_string(5)) {
        let d = a.to_sparse().to_dense();
        prop_assert!(max_diff(&(&d * &d), &Mat::identity(32, 32)) < 1e-14);
        prop_assert!(a.to_sparse().is_hermitian());
    }
}
