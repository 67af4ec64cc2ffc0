use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use qaept::invariants::{
    build_gck_hamiltonian, build_invariant, build_invariant_with, expectation, gdm_from_engineering, invariance_residual,
    lowest_eigenvalues, symmetrized_xp, InvariantSpec, ProductForm,
};
use qaept::lsode::{
    closed_form_ck, closed_form_hermite, integrate_classical, lane_emden_system, BasisRef, HarmonicBasis, LsodeSystem,
};
use qaept::quantum::{ck_eigenstate, ho_eigenstate, Grid, PhysicalConstants};
use qaept::specfun::SeriesControl;

fn consts() -> PhysicalConstants {
    PhysicalConstants::default()
}

fn ck() -> (LsodeSystem, BasisRef) {
    (LsodeSystem::caldirola_kanai(0.4, 1.0, 1.0).unwrap(), Arc::new(closed_form_ck(0.4, 1.0, 1.0).unwrap()))
}

fn hermite() -> (LsodeSystem, BasisRef) {
    (
        LsodeSystem::hermite(0.25, 1.0, 1.0).unwrap(),
        Arc::new(closed_form_hermite(0.25, 1.0, 1.0, SeriesControl::default()).unwrap()),
    )
}

#[test]
fn harmonic_ground_eigenvalue() {
    let g = Grid::symmetric(10.0, 512).unwrap();
    let h = build_gck_hamiltonian(&LsodeSystem::harmonic(1.0, 1.0).unwrap(), &g, &consts(), 0.0).unwrap();
    let ev = lowest_eigenvalues(&h, 1).unwrap();
    assert!((ev[0] - 0.5).abs() <= 1e-4, "{}", ev[0]);
}

#[test]
fn dm_matrix_identity() {
    let (sys, basis) = ck();
    let g = Grid::symmetric(12.0, 512).unwrap();
    let c = consts();
    let spec = InvariantSpec::dodonov_manko(0.4, 1.0).unwrap();
    let sym = symmetrized_xp(&g, &c);
    for &t in &[0.0, 0.7, 2.3] {
        let inv = build_invariant(&spec, basis.as_ref(), &g, &c, t).unwrap();
        let h = build_gck_hamiltonian(&sys, &g, &c, t).unwrap();
        let diff = inv.matrix.sub(&h.matrix).add_scaled(&sym, Complex64::from(-0.2)).max_abs();
        assert!(diff <= 1e-8, "t={t}: {diff:e}");
    }
}

#[test]
fn dm_spectrum_is_time_independent() {
    let (_, basis) = ck();
    let g = Grid::symmetric(12.0, 512).unwrap();
    let c = consts();
    let spec = InvariantSpec::dodonov_manko(0.4, 1.0).unwrap();
    let big = 0.96f64.sqrt();
    let spectra: Vec<Vec<f64>> = [0.0, 1.0, 2.0]
        .iter()
        .map(|&t| lowest_eigenvalues(&build_invariant(&spec, basis.as_ref(), &g, &c, t).unwrap(), 5).unwrap())
        .collect();
    for s in &spectra {
        for (n, v) in s.iter().enumerate() {
            assert!((v - big * (n as f64 + 0.5)).abs() <= 1e-3, "{n}: {v}");
        }
    }
    for n in 0..5 {
        assert!((spectra[0][n] - spectra[1][n]).abs() <= 1e-4);
        assert!((spectra[0][n] - spectra[2][n]).abs() <= 1e-4);
    }
}

#[test]
fn product_assembly_has_spurious_low_mode() {
    let (_, basis) = ck();
    let g = Grid::symmetric(12.0, 512).unwrap();
    let c = consts();
    let spec = InvariantSpec::dodonov_manko(0.4, 1.0).unwrap();
    let ev = lowest_eigenvalues(&build_invariant_with(&ProductForm, &spec, basis.as_ref(), &g, &c, 1.0).unwrap(), 5)
        .unwrap();
    let big = 0.96f64.sqrt();
    let worst = ev.iter().enumerate().map(|(n, v)| (v - big * (n as f64 + 0.5)).abs()).fold(0.0, f64::max);
    assert!(worst > 1e-2, "product form unexpectedly accurate: {ev:?}");
}

#[test]
fn lewis_at_origin_is_the_hamiltonian() {
    let g = Grid::symmetric(10.0, 256).unwrap();
    let c = consts();
    let (sys, basis) = hermite();
    let h0 = build_gck_hamiltonian(&sys, &g, &c, 0.0).unwrap();
    let w0 = sys.omega_sq(0.0).sqrt();
    let inv = build_invariant(&InvariantSpec::lewis(w0).unwrap(), basis.as_ref(), &g, &c, 0.0).unwrap();
    assert!(inv.max_abs_diff(&h0) <= 1e-10);
    let ho: BasisRef = Arc::new(HarmonicBasis::new(1.3, 1.0).unwrap());
    let h = build_gck_hamiltonian(&LsodeSystem::harmonic(1.3, 1.0).unwrap(), &g, &c, 0.0).unwrap();
    let li = build_invariant(&InvariantSpec::lewis(1.3).unwrap(), ho.as_ref(), &g, &c, 0.0).unwrap();
    assert!(li.max_abs_diff(&h) <= 1e-12);
}

#[test]
fn invariance_residuals() {
    let g = Grid::symmetric(10.0, 1024).unwrap();
    let c = consts();
    let ho_sys = LsodeSystem::harmonic(1.0, 1.0).unwrap();
    let ho: BasisRef = Arc::new(HarmonicBasis::new(1.0, 1.0).unwrap());
    let lewis = InvariantSpec::lewis(1.0).unwrap();
    for &t in &[0.0, 2.0] {
        let r = invariance_residual(&lewis, ho.as_ref(), &ho_sys, &g, &c, t, 1e-4).unwrap();
        assert!(r <= 1e-6, "HO t={t}: {r:e}");
    }
    let (sys, basis) = ck();
    let dm = InvariantSpec::dodonov_manko(0.4, 1.0).unwrap();
    for &t in &[0.0, 1.0, 3.0] {
        let r = invariance_residual(&dm, basis.as_ref(), &sys, &g, &c, t, 1e-4).unwrap();
        assert!(r <= 1e-5, "CK t={t}: {r:e}");
    }
    let (sys, basis) = hermite();
    let gdm = gdm_from_engineering(&sys).unwrap();
    for &t in &[0.0, 1.0] {
        let r = invariance_residual(&gdm, basis.as_ref(), &sys, &g, &c, t, 1e-4).unwrap();
        assert!(r <= 1e-5, "Hermite t={t}: {r:e}");
    }
    // operators conserved for one oscillator are not conserved for another
    let other = LsodeSystem::harmonic(1.3, 1.0).unwrap();
    let r = invariance_residual(&lewis, ho.as_ref(), &other, &g, &c, 1.0, 1e-4).unwrap();
    assert!(r > 1e-2, "{r:e}");
}

#[test]
fn numeric_basis_residual_at_start() {
    let g = Grid::symmetric(10.0, 1024).unwrap();
    let c = consts();
    let le = lane_emden_system(0.3, 0.2, 1.0, 1.0).unwrap();
    let t_grid: Vec<f64> = (0..=40).map(|i| 0.05 * i as f64).collect();
    let basis = integrate_classical(&le, &t_grid).unwrap();
    let gdm = gdm_from_engineering(&le).unwrap();
    for &t in &[0.0, 1.0] {
        let r = invariance_residual(&gdm, &basis, &le, &g, &c, t, 1e-4).unwrap();
        assert!(r <= 1e-5, "t={t}: {r:e}");
    }
}

#[test]
fn expectations() {
    let g = Grid::symmetric(18.0, 1800).unwrap();
    let c = consts();
    let h = build_gck_hamiltonian(&LsodeSystem::harmonic(1.0, 1.0).unwrap(), &g, &c, 0.0).unwrap();
    for n in 0..=4 {
        let psi = ho_eigenstate(n, 1.0, 0.0, &g, &c).unwrap();
        let e = expectation(&h, &psi).unwrap();
        assert!((e.re - (n as f64 + 0.5)).abs() <= 1e-6, "n={n}: {e}");
        assert!(e.im.abs() <= 1e-10);
    }
    let (_, basis) = ck();
    let spec = InvariantSpec::dodonov_manko(0.4, 1.0).unwrap();
    for &t in &[0.0, 2.0] {
        let inv = build_invariant(&spec, basis.as_ref(), &g, &c, t).unwrap();
        for n in 0..3 {
            let phi = ck_eigenstate(n, 0.4, 1.0, t, &g, &c).unwrap();
            let e = expectation(&inv, &phi).unwrap();
            assert!((e.re - spec.eigenvalue(n, 1.0).unwrap()).abs() <= 1e-4, "n={n} t={t}: {e}");
        }
    }
    let other = Grid::symmetric(11.0, 512).unwrap();
    assert!(expectation(&h, &ho_eigenstate(0, 1.0, 0.0, &other, &c).unwrap()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn built_matrices_are_hermitian(t in 0.0f64..6.0, w in 0.3f64..2.0, gt in -1.0f64..1.0) {
        let g = Grid::symmetric(8.0, 128).unwrap();
        let c = consts();
        let (sys, basis) = ck();
        let h = build_gck_hamiltonian(&sys, &g, &c, t).unwrap();
        prop_assert!(h.matrix.hermiticity_error() <= 1e-12);
        let spec = InvariantSpec::new(w, gt).unwrap();
        for inv in [
            build_invariant(&spec, basis.as_ref(), &g, &c, t).unwrap(),
            build_invariant_with(&ProductForm, &spec, basis.as_ref(), &g, &c, t).unwrap(),
        ] {
            prop_assert!(inv.hermitian && inv.matrix.hermiticity_error() <= 1e-12);
        }
    }
}
