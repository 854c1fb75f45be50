use super::*;
use crate::eigensolve::{dense_spectrum, DenseOptions};
use crate::spin_basis::{build_hamiltonian, single_site_paulis, Pauli, PauliString, SymmetryKind};
use num_complex::Complex64 as C;

fn refined(model: &ModelSpec) -> (SpectralData, SymmetryTable) {
    let h = build_hamiltonian(model).unwrap();
    let spec = dense_spectrum(&h, &DenseOptions::default()).unwrap().truncated(16);
    let syms = model_symmetries(model).unwrap();
    let spec = refine_by(&spec, &syms).unwrap();
    let table = symmetry_table(&spec, &syms, TOL_SYM).unwrap();
    (spec, table)
}

#[test]
fn refinement_diagonalizes_translation() {
    let model = ModelSpec::j1j2(8, 0.0);
    let (spec, table) = refined(&model);
    let t = &table.columns[0];
    assert!(t.values.iter().all(|v| v.is_some()), "{:?}", t.residuals);
    assert!(spec.orthonormality_error() < 1e-12);
    let h = build_hamiltonian(&model).unwrap();
    assert!(spec.max_residual(&h).unwrap() < 1e-9);
    for v in t.values.iter().flatten() {
        assert!((v.norm() - 1.0).abs() < 1e-12);
        let k = v.arg() * 8.0 / (2.0 * std::f64::consts::PI);
        assert!((k - k.round()).abs() < 1e-9);
    }
}

#[test]
fn non_symmetry_is_rejected() {
    let model = ModelSpec::j1j2(6, 0.2);
    let h = build_hamiltonian(&model).unwrap();
    let spec = dense_spectrum(&h, &DenseOptions::default()).unwrap().truncated(8);
    let x0 = PauliString::single(6, 0, Pauli::X).unwrap().to_sparse();
    assert!(matches!(refine_degenerate(&spec, &x0), Err(crate::Error::NotCommuting { .. })));
}

#[test]
fn predicted_zeros_vanish() {
    for model in [ModelSpec::j1j2(6, 0.0), ModelSpec::j1j2(8, 0.3), ModelSpec::j1j2(6, 2.0)] {
        let (spec, table) = refined(&model);
        let couplers = single_site_paulis(model.n_sites).unwrap();
        let elems: Vec<_> =
            couplers.iter().map(|p| spec.matrix_elements(&p.to_sparse()).unwrap()).collect();
        let rules = selection_rules(&table, &couplers, &elems, 12).unwrap();
        let mut predicted = 0;
        for e in &rules {
            if e.predicted_zero() {
                predicted += 1;
                assert!(e.magnitude < 1e-10, "{model:?} {e:?}");
            }
        }
        assert!(predicted > 0);
    }
}

#[test]
fn bond_reflection_eigenvalue_is_axis_independent() {
    let model = ModelSpec::j1j2(6, 0.0);
    let h = build_hamiltonian(&model).unwrap();
    let spec = dense_spectrum(&h, &DenseOptions::default()).unwrap().truncated(12);
    let mut syms = standard_symmetries();
    let spec = refine_by(&spec, &syms).unwrap();
    for axis in 1..6 {
        syms.push(Symmetry::Lattice(SymmetryKind::BondReflection { axis }));
    }
    let table = symmetry_table(&spec, &syms, TOL_SYM).unwrap();
    for j in 0..table.len() {
        let (Some(_), Some(r0)) = (table.translation(j), table.columns[3].values[j]) else { continue };
        for c in &table.columns[4..] {
            if let Some(r) = c.values[j] {
                assert!((r - r0).norm() < 1e-9, "state {j}");
            }
        }
    }
}

#[test]
fn stabilizer_selection_rules_for_wen() {
    let model = ModelSpec::wen(6);
    let (spec, table) = refined(&model);
    let p = PauliString::single(6, 0, Pauli::Z).unwrap();
    // Ground space is the common +1 eigenspace of every stabilizer.
    for col in table.columns.iter().filter(|c| matches!(c.symmetry, Symmetry::Stabilizer { .. })) {
        assert_eq!(col.values[0], Some(C::new(1.0, 0.0)));
        assert_eq!(col.values[1], Some(C::new(1.0, 0.0)));
    }
    let reasons = zero_reasons(&table, &p, 0, 1).unwrap();
    assert!(reasons.iter().any(|r| matches!(r, ZeroReason::Stabilizer(_))));
    let m = spec.matrix_elements(&p.to_sparse()).unwrap();
    assert!(m[(0, 1)].norm() < 1e-12);
}

#[test]
fn labels() {
    assert_eq!(format_label(None), "none");
    assert_eq!(format_label(Some(C::new(-1.0, 0.0))), "-1");
    assert_eq!(format_label(Some(C::new(0.5, 0.75f64.sqrt()))), "0.5000+0.8660i");
}
