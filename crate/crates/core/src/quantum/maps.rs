//! Unitary lifts of the classical maps to wavefunctions.

use std::sync::Arc;

use num_complex::Complex64;

use crate::arnold::{AeptMap, ArnoldMap};
use crate::error::{Error, Result};

use super::grid::{Grid, WaveFunction};
use super::interp::{InterpolatorRef, Sinc};

/// Resampling and leakage settings for the QAEPT maps.
#[derive(Debug, Clone)]
pub struct MapOptions {
    pub interpolator: InterpolatorRef,
    /// Largest source probability allowed to fall outside the target grid.
    pub leakage_tol: f64,
    /// Output grid; `None` keeps the input grid.
    pub target: Option<Grid>,
}

impl Default for MapOptions {
    fn default() -> Self {
        Self { interpolator: Arc::new(Sinc), leakage_tol: 1e-8, target: None }
    }
}

/// A mapped state together with the source probability lost off-grid.
#[derive(Debug, Clone)]
pub struct MappedState {
    pub psi: WaveFunction,
    pub leakage: f64,
}

/// `φ(κ, τ) = √u2 · exp(−i m u̇2 x² / (2ħ W u2)) ψ(x, t)` on the grid `x/u2`.
///
/// The κ-grid is the input grid divided by `u2(t)`, so no resampling happens
/// and the trapezoid norm is preserved exactly.
pub fn qat_forward(psi: &WaveFunction, map: &ArnoldMap) -> Result<WaveFunction> {
    let basis = map.basis();
    let sys = basis.system();
    if sys.is_forced() {
        return Err(Error::ForcedSystem);
    }
    let (_, tau) = map.forward(0.0, psi.t)?;
    let p = basis.eval(psi.t)?;
    let grid = psi.grid.rescaled(p.u2)?;
    let k = -0.5 * psi.consts.m / psi.consts.hbar * p.u2_dot / (sys.wronskian(psi.t) * p.u2);
    let root = p.u2.sqrt();
    let samples = psi
        .grid
        .points()
        .iter()
        .zip(&psi.samples)
        .map(|(&x, z)| z * Complex64::from_polar(root, k * x * x))
        .collect();
    WaveFunction::new(grid, samples, tau, psi.consts)
}

fn chirp(m_over_hbar: f64, b: f64, bdot: f64, w2: f64) -> f64 {
    0.5 * m_over_hbar * bdot / (w2 * b)
}

fn lost_mass(psi: &WaveFunction, keep: impl Fn(f64) -> bool) -> f64 {
    psi.grid
        .points()
        .iter()
        .enumerate()
        .filter(|(_, &x)| !keep(x))
        .map(|(i, _)| psi.grid.weight(i) * psi.samples[i].norm_sqr())
        .sum()
}

fn inside(g: &Grid, x: f64) -> bool {
    let pad = 1e-12 * (g.x_max() - g.x_min());
    x >= g.x_min() - pad && x <= g.x_max() + pad
}

/// `φ₁(x₁, t₁) = √b · exp(−i m ḃ x₂² / (2ħ W₂ b)) ψ₂(x₂, t₂)` with `x₂ = b x₁`.
///
/// The chirp is removed before resampling so the interpolator only sees the
/// smooth envelope.
pub fn qaept_apply_with(psi2: &WaveFunction, map: &dyn AeptMap, opts: &MapOptions) -> Result<MappedState> {
    let t2 = psi2.t;
    let t1 = map.time_map(t2)?;
    let (b, bd) = (map.value(t2)?, map.derivative(t2)?);
    let k = chirp(psi2.consts.m / psi2.consts.hbar, b, bd, map.w2(t2));
    let target = opts.target.unwrap_or(psi2.grid);
    let leakage = lost_mass(psi2, |x2| inside(&target, x2 / b));
    if leakage > opts.leakage_tol {
        return Err(Error::GridOverflow { leakage });
    }
    let envelope: Vec<Complex64> = psi2
        .grid
        .points()
        .iter()
        .zip(&psi2.samples)
        .map(|(&x, z)| z * Complex64::from_polar(1.0, -k * x * x))
        .collect();
    let x2: Vec<f64> = target.points().iter().map(|x1| b * x1).collect();
    let root = b.sqrt();
    let samples = opts.interpolator.resample(&psi2.grid, &envelope, &x2).into_iter().map(|z| z * root).collect();
    Ok(MappedState { psi: WaveFunction::new(target, samples, t1, psi2.consts)?, leakage })
}

/// `ψ₂(x₂, t₂) = b^{−1/2} · exp(+i m ḃ x₂² / (2ħ W₂ b)) φ₁(x₂/b, t₁)`, with
/// `t₂` recovered from the stamp `t₁` of `phi1`.
pub fn qaept_inverse_with(phi1: &WaveFunction, map: &dyn AeptMap, opts: &MapOptions) -> Result<MappedState> {
    let t1 = phi1.t;
    let t2 = map.inverse_time_map(t1)?;
    let (b, bd) = (map.value(t2)?, map.derivative(t2)?);
    let k = chirp(phi1.consts.m / phi1.consts.hbar, b, bd, map.w2(t2));
    let target = opts.target.unwrap_or(phi1.grid);
    let leakage = lost_mass(phi1, |x1| inside(&target, x1 * b));
    if leakage > opts.leakage_tol {
        return Err(Error::GridOverflow { leakage });
    }
    let xs = target.points();
    let x1: Vec<f64> = xs.iter().map(|x2| x2 / b).collect();
    let inv_root = 1.0 / b.sqrt();
    let samples = opts
        .interpolator
        .resample(&phi1.grid, &phi1.samples, &x1)
        .into_iter()
        .zip(&xs)
        .map(|(z, &x)| z * Complex64::from_polar(inv_root, k * x * x))
        .collect();
    Ok(MappedState { psi: WaveFunction::new(target, samples, t2, phi1.consts)?, leakage })
}

pub fn qaept_apply(psi2: &WaveFunction, map: &dyn AeptMap) -> Result<WaveFunction> {
    Ok(qaept_apply_with(psi2, map, &MapOptions::default())?.psi)
}

pub fn qaept_inverse(phi1: &WaveFunction, map: &dyn AeptMap) -> Result<WaveFunction> {
    Ok(qaept_inverse_with(phi1, map, &MapOptions::default())?.psi)
}
