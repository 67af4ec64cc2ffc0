//! Classical Arnold and Arnold–Ermakov–Pinney transformations.
//!
//! [`ArnoldMap`] straightens trajectories of one system into free-particle
//! lines on the patch around `t = 0` where `u2 ≠ 0`. The [`AeptMap`]
//! implementors connect two systems globally in time.

mod aept;
mod angle;
mod profile;

pub use aept::{
    compose_aept, engineer_b_from_wronskian, time_map_arctan, AeptMap, ComposedMap, HarmonicAuxMap, MapRef,
    WronskianMap, DEFAULT_HORIZON,
};
pub use profile::{
    b_from_basis, classical_lewis, classical_lewis_weighted, ermakov_residual, ermakov_residual_bracketed, pinney_superposition, BFromBasis,
    ConstantProfile, PinneyCoefficients, PinneyProfile, Profile, ProfileRef, WronskianProfile,
};

use crate::error::{invalid, Error, Result};
use crate::lsode::{scan_zeros, BasisRef};
use crate::numerics::monotone_root;

/// `(x, t) ↦ (κ, τ) = ((x − up)/u2, u1/u2)` on the patch where `u2 > 0`.
#[derive(Debug, Clone)]
pub struct ArnoldMap {
    basis: BasisRef,
    patch: (f64, f64),
    open: (bool, bool),
}

/// Zero of `u2` nearest to the origin in direction `dir`, if any before `end`.
fn first_focal_point(basis: &BasisRef, end: f64) -> Result<Option<f64>> {
    if end == 0.0 {
        return Ok(None);
    }
    let step = 0.01 * basis.system().timescale();
    let (a, b) = if end > 0.0 { (0.0, end) } else { (end, 0.0) };
    let scan = scan_zeros(|t| basis.eval(t).map(|p| (p.u2, p.u2_dot)), a, b, step)?;
    Ok(if end > 0.0 { scan.roots.first().copied() } else { scan.roots.last().copied() })
}

impl ArnoldMap {
    /// Builds the map, searching for focal points within `horizon` of zero.
    pub fn new(basis: BasisRef, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0) {
            return Err(invalid("patch search horizon must be positive"));
        }
        let (lo, hi) = basis.span();
        let (lo, hi) = (lo.max(-horizon), hi.min(horizon));
        let right = first_focal_point(&basis, hi)?;
        let left = first_focal_point(&basis, lo)?;
        Ok(Self {
            patch: (left.unwrap_or(lo), right.unwrap_or(hi)),
            open: (left.is_some(), right.is_some()),
            basis,
        })
    }

    pub fn with_default_horizon(basis: BasisRef) -> Result<Self> {
        Self::new(basis, DEFAULT_HORIZON)
    }

    pub fn patch(&self) -> (f64, f64) {
        self.patch
    }

    pub fn basis(&self) -> &BasisRef {
        &self.basis
    }

    fn inside(&self, t: f64) -> bool {
        let (lo, hi) = self.patch;
        let above = if self.open.0 { t > lo } else { t >= lo };
        let below = if self.open.1 { t < hi } else { t <= hi };
        above && below
    }

    pub fn forward(&self, x: f64, t: f64) -> Result<(f64, f64)> {
        let p = self.basis.eval(t)?;
        if !self.inside(t) || p.u2 == 0.0 {
            let edge = if t >= 0.0 { self.patch.1 } else { self.patch.0 };
            return Err(Error::FocalPoint { t: edge });
        }
        Ok(((x - p.up) / p.u2, p.u1 / p.u2))
    }

    /// Solves `u1 − τ·u2 = 0` inside the patch, then undoes the scaling.
    pub fn inverse(&self, kappa: f64, tau: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.patch;
        let g = |t: f64| self.basis.eval(t).map(|p| p.u1 - tau * p.u2);
        let dg = |t: f64| self.basis.eval(t).map(|p| p.u1_dot - tau * p.u2_dot);
        let t = monotone_root(g, dg, lo, hi, 1e-15)?;
        let p = self.basis.eval(t)?;
        Ok((kappa * p.u2 + p.up, t))
    }
}

pub fn arnold_forward(map: &ArnoldMap, x: f64, t: f64) -> Result<(f64, f64)> {
    map.forward(x, t)
}

pub fn arnold_inverse(map: &ArnoldMap, kappa: f64, tau: f64) -> Result<(f64, f64)> {
    map.inverse(kappa, tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lsode::{closed_form_ck, FreeBasis, HarmonicBasis};
    use std::sync::Arc;

    #[test]
    fn free_particle_is_identity() {
        let map = ArnoldMap::new(Arc::new(FreeBasis::new(1.0).unwrap()), 20.0).unwrap();
        assert_eq!(map.patch(), (-20.0, 20.0));
        assert_eq!(map.forward(1.3, 4.0).unwrap(), (1.3, 4.0));
        let (x, t) = map.inverse(1.3, 4.0).unwrap();
        assert!((x - 1.3).abs() < 1e-15 && (t - 4.0).abs() < 1e-12);
    }

    #[test]
    fn ck_tau_at_quarter_period() {
        let (g, w) = (0.4, 1.0);
        let map = ArnoldMap::new(Arc::new(closed_form_ck(g, w, 1.0).unwrap()), 20.0).unwrap();
        let om = (w * w - g * g / 4.0f64).sqrt();
        let (_, tau) = map.forward(0.0, std::f64::consts::FRAC_PI_2 / om).unwrap();
        assert!((tau - 5.0).abs() < 1e-12);
        let (lo, hi) = map.patch();
        assert!(matches!(map.forward(0.0, hi + 0.1), Err(Error::FocalPoint { .. })));
        assert!(lo < 0.0 && hi > 0.0);
    }

    #[test]
    fn harmonic_tau_is_tangent() {
        let w = 2.0;
        let map = ArnoldMap::new(Arc::new(HarmonicBasis::new(w, 1.0).unwrap()), 20.0).unwrap();
        let (lo, hi) = map.patch();
        let q = std::f64::consts::FRAC_PI_2 / w;
        assert!((hi - q).abs() < 1e-12 && (lo + q).abs() < 1e-12);
        let (_, tau) = map.forward(0.0, 0.6).unwrap();
        assert!((tau - (w * 0.6f64).tan() / w).abs() < 1e-14);
        let (_, t) = map.inverse(0.0, 3.0).unwrap();
        assert!((t - (w * 3.0f64).atan() / w).abs() < 1e-13);
    }
}
