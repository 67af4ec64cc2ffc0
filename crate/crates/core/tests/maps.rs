use std::sync::Arc;

use proptest::prelude::*;
use qaept::arnold::{
    b_from_basis, classical_lewis_weighted, compose_aept, engineer_b_from_wronskian, ermakov_residual,
    ermakov_residual_bracketed,
    pinney_superposition, time_map_arctan, AeptMap, ArnoldMap, HarmonicAuxMap, PinneyCoefficients, Profile,
};
use qaept::lsode::{
    closed_form_ck, closed_form_hermite, integrate_classical, lane_emden_system, scan_zeros, BasisRef,
    ClassicalBasis, FreeBasis, HarmonicBasis, LsodeSystem,
};
use qaept::numerics::integrate;
use qaept::specfun::SeriesControl;

fn ck() -> BasisRef {
    Arc::new(closed_form_ck(0.4, 1.0, 1.0).unwrap())
}

fn harmonic(w: f64) -> BasisRef {
    Arc::new(HarmonicBasis::new(w, 1.0).unwrap())
}

fn quad_time_map(map: &dyn AeptMap, t: f64) -> f64 {
    integrate(
        |s| {
            let b = map.value(s)?;
            Ok(map.w2(s) / (b * b * map.w1(map.time_map(s)?)))
        },
        0.0,
        t,
        1e-13,
        1e-13,
    )
    .unwrap()
}

#[test]
fn self_composition_is_identity() {
    let b = ck();
    let map = compose_aept(b.clone(), b).unwrap();
    for &t in &[0.0, 2.0, 7.3] {
        assert_eq!(map.value(t).unwrap(), 1.0);
        assert_eq!(map.time_map(t).unwrap(), t);
    }
}

#[test]
fn composition_with_harmonic_reproduces_displayed_b() {
    let (g, w, w0) = (0.4, 1.0, 1.0);
    let map = compose_aept(harmonic(w0), ck()).unwrap();
    let om = (w * w - g * g / 4.0f64).sqrt();
    for i in 0..=40 {
        let t = 0.25 * i as f64;
        let (s, c) = (om * t).sin_cos();
        let shown = (-g * t / 2.0).exp() * ((c + g * s / (2.0 * om)).powi(2) + w0 * w0 * s * s / (om * om)).sqrt();
        assert!((map.value(t).unwrap() - shown).abs() < 1e-12, "t={t}");
    }
}

#[test]
fn free_target_reduces_to_arnold_map() {
    let map = compose_aept(Arc::new(FreeBasis::new(1.0).unwrap()), ck()).unwrap();
    let arnold = ArnoldMap::new(ck(), 20.0).unwrap();
    let (_, hi) = arnold.patch();
    for i in 0..20 {
        let t = hi * i as f64 / 20.0;
        let (_, tau) = arnold.forward(0.0, t).unwrap();
        let p = ck().eval(t).unwrap();
        assert!((map.time_map(t).unwrap() - tau).abs() <= 1e-9 * (1.0 + tau.abs()), "t={t}");
        assert!((map.value(t).unwrap() - p.u2).abs() < 1e-9);
    }
    assert!(map.time_map(hi + 0.5).is_err());
}

#[test]
fn global_time_map_matches_quadrature() {
    let basis = ck();
    let zeros = scan_zeros(|t| basis.eval(t).map(|p| (p.u2, p.u2_dot)), 0.0, 10.0, 0.01).unwrap();
    assert!(zeros.count >= 2);
    let map = HarmonicAuxMap::new(basis.clone(), 1.0, 0.0, (0.0, 10.0)).unwrap();
    let mut prev = -1.0;
    for i in 0..=100 {
        let t = 0.1 * i as f64;
        let t1 = map.time_map(t).unwrap();
        assert!(t1 > prev || i == 0);
        prev = t1;
        assert!((t1 - quad_time_map(&map, t)).abs() <= 1e-8, "t={t}");
        assert!((time_map_arctan(basis.clone(), 1.0, t).unwrap() - t1).abs() < 1e-12);
    }
}

#[test]
fn composed_time_map_matches_quadrature_across_focal_points() {
    let herm: BasisRef = Arc::new(closed_form_hermite(0.25, 1.0, 1.0, SeriesControl::default()).unwrap());
    let map = compose_aept(harmonic(0.7), ck()).unwrap();
    let map2 = compose_aept(ck(), herm).unwrap();
    for m in [&map as &dyn AeptMap, &map2] {
        for i in 0..=20 {
            let t = 0.5 * i as f64;
            let t1 = m.time_map(t).unwrap();
            assert!((t1 - quad_time_map(m, t)).abs() <= 1e-8, "t={t}");
            assert!((m.inverse_time_map(t1).unwrap() - t).abs() < 1e-9);
        }
    }
}

#[test]
fn ermakov_residuals_vanish() {
    let sys_h = LsodeSystem::harmonic(1.0, 1.0).unwrap();
    let b = b_from_basis(ck(), 1.0).unwrap();
    let ck_sys = ck().system().clone();
    let herm_sys = LsodeSystem::hermite(0.25, 1.0, 1.0).unwrap();
    let (bw_ck, aux_ck) = engineer_b_from_wronskian(&ck_sys).unwrap();
    let (bw_h, aux_h) = engineer_b_from_wronskian(&herm_sys).unwrap();
    let composed = compose_aept(ck(), Arc::new(closed_form_hermite(0.25, 1.0, 1.0, SeriesControl::default()).unwrap()))
        .unwrap();
    for i in 0..=50 {
        let t = 0.2 * i as f64;
        assert!(ermakov_residual(&b, &ck_sys, &sys_h, t, t).unwrap().abs() <= 1e-6);
        assert!(ermakov_residual(&bw_ck, &ck_sys, &aux_ck, t, t).unwrap().abs() <= 1e-6);
        assert!(ermakov_residual(&bw_h, &herm_sys, &aux_h, t, t).unwrap().abs() <= 1e-6);
        assert!(composed.ermakov_residual(t).unwrap().abs() <= 1e-6, "t={t}");
        assert!((aux_ck.omega_sq(t) - 0.96).abs() < 1e-12);
        assert!((aux_h.omega_sq(t) - (1.0 - 0.125 - 0.015625 * t * t)).abs() < 1e-9);
    }
}

#[test]
fn bracketed_form_only_differs_for_damped_target() {
    let herm: BasisRef = Arc::new(closed_form_hermite(0.25, 1.0, 1.0, SeriesControl::default()).unwrap());
    let damped = compose_aept(ck(), herm.clone()).unwrap();
    let undamped = compose_aept(harmonic(1.0), herm.clone()).unwrap();
    let t = 1.0;
    let t1 = damped.time_map(t).unwrap();
    let with = ermakov_residual_bracketed(&damped, herm.system(), ck().system(), &*ck(), t, t1).unwrap();
    assert!(with.abs() > 1e-3);
    let t1 = undamped.time_map(t).unwrap();
    let h = harmonic(1.0);
    let with = ermakov_residual_bracketed(&undamped, herm.system(), h.system(), &*h, t, t1).unwrap();
    assert!(with.abs() <= 1e-6);
}

#[test]
fn pinney_matches_b_from_basis() {
    let w0 = 1.3;
    let c = PinneyCoefficients::new(w0 * w0, 1.0, 0.0).unwrap();
    let p = pinney_superposition(ck(), c);
    let b = b_from_basis(ck(), w0).unwrap();
    for &t in &[0.0, 1.0, 4.4, 9.0] {
        assert!((p.value(t).unwrap() - b.value(t).unwrap()).abs() < 1e-14);
        assert!((p.second_derivative(t).unwrap() - b.second_derivative(t).unwrap()).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pinney_solves_ermakov(c1 in 0.2f64..3.0, c3 in -1.0f64..1.0, w0 in 0.3f64..2.0, t in 0.0f64..10.0) {
        let sys = LsodeSystem::harmonic(1.1, 1.0).unwrap();
        let basis = harmonic(1.1);
        let c = PinneyCoefficients::for_omega0(w0, c1, c3).unwrap();
        let p = pinney_superposition(basis, c);
        let aux = LsodeSystem::harmonic(w0, 1.0).unwrap();
        prop_assert!(ermakov_residual(&p, &sys, &aux, t, t).unwrap().abs() <= 1e-8);
    }

    #[test]
    fn arnold_round_trip(x in -5.0f64..5.0, frac in -0.95f64..0.95) {
        let map = ArnoldMap::new(ck(), 20.0).unwrap();
        let (lo, hi) = map.patch();
        let t = if frac >= 0.0 { frac * hi } else { -frac * lo };
        let (k, tau) = map.forward(x, t).unwrap();
        let (x2, t2) = map.inverse(k, tau).unwrap();
        prop_assert!((x2 - x).abs() <= 1e-9 && (t2 - t).abs() <= 1e-9);
    }
}

#[test]
fn lewis_invariant_is_conserved_on_numeric_trajectories() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let t_grid: Vec<f64> = (0..=100).map(|i| 0.1 * i as f64).collect();
    let systems: Vec<(LsodeSystem, BasisRef)> = vec![
        (LsodeSystem::free(1.0), Arc::new(FreeBasis::new(1.0).unwrap())),
        (LsodeSystem::harmonic(1.4, 1.0).unwrap(), harmonic(1.4)),
        (ck().system().clone(), ck()),
        (
            LsodeSystem::hermite(0.25, 1.0, 1.0).unwrap(),
            Arc::new(closed_form_hermite(0.25, 1.0, 1.0, SeriesControl::default()).unwrap()),
        ),
        {
            let le = lane_emden_system(0.3, 0.2, 1.0, 1.0).unwrap();
            let b: BasisRef = Arc::new(integrate_classical(&le, &t_grid).unwrap());
            (le, b)
        },
    ];
    for (sys, basis) in &systems {
        let traj = integrate_classical(sys, &t_grid).unwrap();
        let b = b_from_basis(basis.clone(), 1.0).unwrap();
        for _ in 0..10 {
            let (a1, a2): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let lewis = |t: f64| {
                let p = traj.eval(t).unwrap();
                let (x, v) = (a1 * p.u1 + a2 * p.u2, a1 * p.u1_dot + a2 * p.u2_dot);
                classical_lewis_weighted(x, v, b.value(t).unwrap(), b.derivative(t).unwrap(), sys.mass(), 1.0, sys.wronskian(t))
            };
            let i0 = lewis(0.0);
            for k in 1..=20 {
                let t = 0.5 * k as f64;
                assert!((lewis(t) - i0).abs() <= 1e-6 * i0.abs(), "{} t={t}", sys.name());
            }
        }
    }
}
