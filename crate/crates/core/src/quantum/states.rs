//! Closed-form states: harmonic stationary states, invariant eigenstates,
//! Gaussian packets and the Lewis–Riesenfeld phase.

use num_complex::Complex64;

use crate::arnold::{AeptMap, HarmonicAuxMap, Profile};
use crate::error::{invalid, Error, Result};
use crate::lsode::BasisRef;
use crate::numerics::integrate;
use crate::specfun::hermite_function;

use super::grid::{Grid, PhysicalConstants, WaveFunction};

/// Largest normalized Hermite-function amplitude tolerated at a grid edge.
pub const EDGE_AMPLITUDE_TOL: f64 = 1e-10;

fn edge_check(grid: &Grid, scale: f64, n: usize, width: f64) -> Result<()> {
    let have = grid.x_max().min(-grid.x_min());
    if hermite_function(n, grid.x_max() / scale).abs() > EDGE_AMPLITUDE_TOL
        || hermite_function(n, grid.x_min() / scale).abs() > EDGE_AMPLITUDE_TOL
    {
        return Err(Error::GridTooNarrow { have, need: width });
    }
    Ok(())
}

/// Stationary state `ψ_n(x) e^{−i(n+½)ω₀t}`. The grid must reach
/// `6·√(ħ(2n+1)/(mω₀))` on both sides.
pub fn ho_eigenstate(n: usize, omega0: f64, t: f64, grid: &Grid, consts: &PhysicalConstants) -> Result<WaveFunction> {
    if !(omega0 > 0.0) {
        return Err(invalid(format!("oscillator frequency must be positive, got {omega0}")));
    }
    let len = (consts.hbar / (consts.m * omega0)).sqrt();
    let need = 6.0 * len * ((2 * n + 1) as f64).sqrt();
    let have = grid.x_max().min(-grid.x_min());
    if have < need {
        return Err(Error::GridTooNarrow { have, need });
    }
    let phase = Complex64::from_polar(len.powf(-0.5), -(n as f64 + 0.5) * omega0 * t);
    let samples = grid.points().iter().map(|&x| phase * hermite_function(n, x / len)).collect();
    Ok(WaveFunction::new(*grid, samples, t, *consts)?.normalized())
}

/// Eigenstate of the general quadratic invariant `Î(ω̃, γ̃)`:
///
/// `φ_n = e^{−i(n+½)θ} b̃^{−1/2} χ_n(x/b̃) exp(i m ḃ̃ x² / (2ħ W b̃))`
///
/// where `χ_n` is the oscillator eigenfunction of frequency `Ω̃`, `b̃ =
/// √(ũ2² + Ω̃²u1²)` and `θ` is `arg(ũ2 + iΩ̃u1)` tracked continuously from 0.
pub fn dm_eigenstate(
    basis: BasisRef,
    omega_tilde: f64,
    gamma_tilde: f64,
    n: usize,
    t: f64,
    grid: &Grid,
    consts: &PhysicalConstants,
) -> Result<WaveFunction> {
    let big_sq = omega_tilde * omega_tilde - 0.25 * gamma_tilde * gamma_tilde;
    if !(big_sq > 0.0) {
        return Err(Error::ContinuousSpectrum { omega_sq: big_sq });
    }
    let map = HarmonicAuxMap::new(basis, big_sq.sqrt(), gamma_tilde, (t.min(0.0), t.max(0.0)))?;
    dm_eigenstate_on(&map, n, t, grid, consts)
}

/// [`dm_eigenstate`] reusing a prebuilt auxiliary map (its `ω₀` is `Ω̃`).
pub fn dm_eigenstate_on(
    map: &HarmonicAuxMap,
    n: usize,
    t: f64,
    grid: &Grid,
    consts: &PhysicalConstants,
) -> Result<WaveFunction> {
    let big = map.omega0();
    let (b, bd) = (map.value(t)?, map.derivative(t)?);
    let theta = map.angle(t)?;
    let len = (consts.hbar / (consts.m * big)).sqrt();
    edge_check(grid, len * b, n, len * b * ((2 * n + 1) as f64).sqrt() + 6.0 * len * b)?;
    let k = 0.5 * consts.m / consts.hbar * bd / (map.w2(t) * b);
    let global = Complex64::from_polar((len * b).powf(-0.5), -(n as f64 + 0.5) * theta);
    let samples = grid
        .points()
        .iter()
        .map(|&x| global * hermite_function(n, x / (len * b)) * Complex64::from_polar(1.0, k * x * x))
        .collect();
    Ok(WaveFunction::new(*grid, samples, t, *consts)?.normalized())
}

/// Damped-oscillator eigenstate from its closed form
///
/// `N e^{−i(n+½)Ωt} e^{γt/4} exp(−(m/2ħ)(Ω + iγ/2)e^{γt}x²) H_n(√(mΩ/ħ) e^{γt/2} x)`.
pub fn ck_eigenstate(
    n: usize,
    gamma: f64,
    omega: f64,
    t: f64,
    grid: &Grid,
    consts: &PhysicalConstants,
) -> Result<WaveFunction> {
    let big_sq = omega * omega - 0.25 * gamma * gamma;
    if !(big_sq > 0.0) || gamma < 0.0 {
        return Err(Error::Overdamped { gamma, omega });
    }
    let big = big_sq.sqrt();
    let (m, hbar) = (consts.m, consts.hbar);
    let squeeze = (0.5 * gamma * t).exp();
    let len = (hbar / (m * big)).sqrt() / squeeze;
    edge_check(grid, len, n, len * (((2 * n + 1) as f64).sqrt() + 6.0))?;
    let chirp = -0.25 * m * gamma / hbar * squeeze * squeeze;
    let global = Complex64::from_polar(len.powf(-0.5), -(n as f64 + 0.5) * big * t);
    let samples = grid
        .points()
        .iter()
        .map(|&x| global * hermite_function(n, x / len) * Complex64::from_polar(1.0, chirp * x * x))
        .collect();
    Ok(WaveFunction::new(*grid, samples, t, *consts)?.normalized())
}

/// Normalized packet `(2πσ²)^{−1/4} exp(−(x−x₀)²/4σ² + i p₀(x−x₀)/ħ)`.
pub fn gaussian_packet(
    grid: &Grid,
    consts: &PhysicalConstants,
    x0: f64,
    p0: f64,
    sigma: f64,
    t: f64,
) -> Result<WaveFunction> {
    if !(sigma > 0.0) {
        return Err(invalid(format!("packet width must be positive, got {sigma}")));
    }
    let amp = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25);
    let samples = grid
        .points()
        .iter()
        .map(|&x| {
            let d = x - x0;
            Complex64::from_polar(amp * (-d * d / (4.0 * sigma * sigma)).exp(), p0 * d / consts.hbar)
        })
        .collect();
    Ok(WaveFunction::new(*grid, samples, t, *consts)?.normalized())
}

/// `α_s(t) = −(λ_s/ħ) ∫₀ᵗ w(s)/b(s)² ds`.
pub fn lewis_phase_weighted(
    lambda_s: f64,
    b: &dyn Profile,
    w: impl Fn(f64) -> f64,
    t: f64,
    consts: &PhysicalConstants,
) -> Result<f64> {
    let integral = integrate(
        |s| {
            let bv = b.value(s)?;
            if !(bv > 0.0) {
                return Err(Error::NonPositive { t: s });
            }
            Ok(w(s) / (bv * bv))
        },
        0.0,
        t,
        1e-13,
        1e-13,
    )?;
    Ok(-lambda_s / consts.hbar * integral)
}

/// Undamped Lewis–Riesenfeld phase `−(λ_s/ħ) ∫₀ᵗ ds/b²`.
pub fn lewis_phase(lambda_s: f64, b: &dyn Profile, t: f64, consts: &PhysicalConstants) -> Result<f64> {
    lewis_phase_weighted(lambda_s, b, |_| 1.0, t, consts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arnold::{b_from_basis, time_map_arctan, ConstantProfile, WronskianProfile};
    use crate::lsode::{closed_form_ck, HarmonicBasis, LsodeSystem};
    use std::sync::Arc;

    fn grid() -> Grid {
        Grid::symmetric(12.0, 512).unwrap()
    }

    #[test]
    fn ho_ground_state_is_standard_gaussian() {
        let (w, c) = (1.3, PhysicalConstants::default());
        let psi = ho_eigenstate(0, w, 0.0, &grid(), &c).unwrap();
        let pref = (w / std::f64::consts::PI).powf(0.25);
        for (i, &x) in grid().points().iter().enumerate().step_by(37) {
            assert!((psi.samples[i] - Complex64::new(pref * (-w * x * x / 2.0).exp(), 0.0)).norm() < 1e-12);
        }
        assert!(matches!(ho_eigenstate(8, 0.2, 0.0, &grid(), &c), Err(Error::GridTooNarrow { .. })));
    }

    #[test]
    fn ho_orthonormality() {
        let c = PhysicalConstants::default();
        let g = Grid::symmetric(25.0, 1024).unwrap();
        let states: Vec<_> = (0..=8).map(|n| ho_eigenstate(n, 1.0, 0.4, &g, &c).unwrap()).collect();
        for (m, a) in states.iter().enumerate() {
            for (n, b) in states.iter().enumerate() {
                let ip = a.inner(b).unwrap().norm();
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-8, "<{m}|{n}> = {ip}");
            }
        }
    }

    #[test]
    fn dm_state_on_harmonic_basis_is_ho_state() {
        let c = PhysicalConstants::default();
        let basis: BasisRef = Arc::new(HarmonicBasis::new(1.0, 1.0).unwrap());
        let g = Grid::symmetric(14.0, 512).unwrap();
        for n in 0..3 {
            for &t in &[0.0, 0.8, 7.0] {
                let dm = dm_eigenstate(basis.clone(), 1.0, 0.0, n, t, &g, &c).unwrap();
                let ho = ho_eigenstate(n, 1.0, t, &g, &c).unwrap();
                assert!(dm.max_abs_diff(&ho).unwrap() < 1e-9, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn dm_state_on_ck_basis_is_ck_state() {
        let c = PhysicalConstants::default();
        let basis: BasisRef = Arc::new(closed_form_ck(0.4, 1.0, 1.0).unwrap());
        for n in 0..4 {
            for &t in &[0.0, 1.3, 5.0, 9.0] {
                let dm = dm_eigenstate(basis.clone(), 1.0, 0.4, n, t, &grid(), &c).unwrap();
                let ck = ck_eigenstate(n, 0.4, 1.0, t, &grid(), &c).unwrap();
                assert!(dm.max_abs_diff(&ck).unwrap() < 1e-9, "n={n} t={t}");
            }
        }
        assert!(matches!(
            dm_eigenstate(basis, 0.1, 0.4, 0, 0.0, &grid(), &c),
            Err(Error::ContinuousSpectrum { .. })
        ));
    }

    #[test]
    fn ck_state_limits() {
        let c = PhysicalConstants::default();
        let g = Grid::symmetric(14.0, 512).unwrap();
        let ck = ck_eigenstate(2, 0.0, 1.0, 1.1, &g, &c).unwrap();
        let ho = ho_eigenstate(2, 1.0, 1.1, &g, &c).unwrap();
        assert!(ck.max_abs_diff(&ho).unwrap() < 1e-12);
        assert!(matches!(ck_eigenstate(0, 3.0, 1.0, 0.0, &grid(), &c), Err(Error::Overdamped { .. })));
        // complex width Ω + iγ/2 at t = 0
        let g0 = ck_eigenstate(0, 0.4, 1.0, 0.0, &grid(), &c).unwrap();
        let (i, x) = (300, grid().x(300));
        let ratio = g0.samples[i] / g0.samples[255];
        let want = (-(0.96f64.sqrt() + Complex64::new(0.0, 0.2)) * 0.5 * (x * x - grid().x(255).powi(2))).exp();
        assert!((ratio - want).norm() < 1e-10);
    }

    #[test]
    fn lewis_phase_examples() {
        let c = PhysicalConstants::default();
        assert!((lewis_phase(0.7, &ConstantProfile(1.0), 3.0, &c).unwrap() + 2.1).abs() < 1e-13);
        let basis: BasisRef = Arc::new(closed_form_ck(0.4, 1.0, 1.0).unwrap());
        let b = b_from_basis(basis.clone(), 1.0).unwrap();
        let sys = basis.system().clone();
        let a = lewis_phase_weighted(0.5, &b, |s| sys.wronskian(s), 8.0, &c).unwrap();
        assert!((a + 0.5 * time_map_arctan(basis, 1.0, 8.0).unwrap()).abs() < 1e-9);
        let sys = LsodeSystem::caldirola_kanai(0.4, 1.0, 1.0).unwrap();
        let wb = WronskianProfile { system: sys.clone() };
        let lam = 0.96f64.sqrt() * 1.5;
        let a = lewis_phase_weighted(lam, &wb, |s| sys.wronskian(s), 4.0, &c).unwrap();
        assert!((a + lam * 4.0).abs() < 1e-11);
        let split = lewis_phase(1.0, &b, 2.0, &c).unwrap() + (lewis_phase(1.0, &b, 5.0, &c).unwrap() - lewis_phase(1.0, &b, 2.0, &c).unwrap());
        assert!((split - lewis_phase(1.0, &b, 5.0, &c).unwrap()).abs() < 1e-12);
    }
}
