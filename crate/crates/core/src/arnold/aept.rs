//! Arnold–Ermakov–Pinney maps `x₁ = x₂/b(t₂)`, `W₁dt₁ = W₂dt₂/b²`.

use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::lsode::{BasisRef, ClassicalBasis, EngineeredUndamped, LsodeSystem};

use super::angle::{AngleTrack, Coverage, PolarFn};
use super::profile::{ermakov_residual, Profile, WronskianProfile};

/// Default half-width of the time window a map is tabulated on.
pub const DEFAULT_HORIZON: f64 = 50.0;

/// Transformation from system 2 (the physical one) to system 1.
pub trait AeptMap: Profile {
    fn system1(&self) -> &LsodeSystem;
    fn system2(&self) -> &LsodeSystem;
    fn time_map(&self, t2: f64) -> Result<f64>;
    fn inverse_time_map(&self, t1: f64) -> Result<f64>;
    /// Auxiliary frequency of system 1 (zero when it is not a fixed oscillator).
    fn omega0(&self) -> f64;
    /// Range of `t2` the map is tabulated on.
    fn span(&self) -> (f64, f64);
    fn basis1(&self) -> Option<&dyn ClassicalBasis> {
        None
    }
    fn w1(&self, t1: f64) -> f64 {
        self.system1().wronskian(t1)
    }
    fn w2(&self, t2: f64) -> f64 {
        self.system2().wronskian(t2)
    }
    fn ermakov_residual(&self, t2: f64) -> Result<f64> {
        let t1 = self.time_map(t2)?;
        ermakov_residual(self.as_profile(), self.system2(), self.system1(), t2, t1)
    }
    fn as_profile(&self) -> &dyn Profile;
}

pub type MapRef = Arc<dyn AeptMap>;

fn clip_span(span: (f64, f64), horizon: (f64, f64)) -> (f64, f64) {
    (span.0.max(horizon.0), span.1.min(horizon.1))
}

/// Curve `(u2 − g·u1, s·u1)` whose polar angle advances at `s·W/r²`.
fn polar_curve(basis: BasisRef, s: f64, g: f64) -> PolarFn {
    Arc::new(move |t| {
        let p = basis.eval(t)?;
        let (x, y) = (p.u2 - g * p.u1, s * p.u1);
        Ok((x, y, s * p.wronskian() / (x * x + y * y)))
    })
}

/// Composition `A₁⁻¹ ∘ A₂` of two Arnold maps, continued through focal
/// points by matching the unwrapped angles `atan2(s·u1, u2)` of both bases.
/// There `b = r₂/r₁` with `r = √(u2² + s²u1²)`.
#[derive(Debug, Clone)]
pub struct ComposedMap {
    basis1: BasisRef,
    basis2: BasisRef,
    scale: f64,
    omega0: f64,
    identity: bool,
    track1: AngleTrack,
    track2: AngleTrack,
}

pub fn compose_aept(basis1: BasisRef, basis2: BasisRef) -> Result<ComposedMap> {
    ComposedMap::new(basis1, basis2, (-DEFAULT_HORIZON, DEFAULT_HORIZON))
}

impl ComposedMap {
    pub fn new(basis1: BasisRef, basis2: BasisRef, horizon: (f64, f64)) -> Result<Self> {
        let sys1 = basis1.system();
        let omega0 = if sys1.name() == "harmonic" { sys1.omega_sq(0.0).sqrt() } else { 0.0 };
        let scale = if omega0 > 0.0 { omega0 } else { 1.0 / sys1.timescale() };
        let identity = Arc::ptr_eq(&basis1, &basis2);
        let (lo2, hi2) = clip_span(basis2.span(), horizon);
        let h2 = 0.05 * basis2.system().timescale();
        let track2 = AngleTrack::build(polar_curve(basis2.clone(), scale, 0.0), lo2, hi2, h2, Coverage::NONE)?;
        let (a, b) = track2.theta_range();
        let reach = 1e6 * sys1.timescale();
        let (lo1, hi1) = clip_span(basis1.span(), (-reach, reach));
        let h1 = 0.05 * sys1.timescale();
        let cover = Coverage { theta_lo: a, theta_hi: b };
        let track1 = AngleTrack::build(polar_curve(basis1.clone(), scale, 0.0), lo1, hi1, h1, cover)?;
        Ok(Self { basis1, basis2, scale, omega0, identity, track1, track2 })
    }

    fn radius(&self, basis: &dyn ClassicalBasis, t: f64) -> Result<(f64, f64)> {
        let p = basis.eval(t)?;
        let s2 = self.scale * self.scale;
        let r = p.u2.hypot(self.scale * p.u1);
        Ok((r, (p.u2 * p.u2_dot + s2 * p.u1 * p.u1_dot) / r))
    }
}

impl Profile for ComposedMap {
    fn value(&self, t2: f64) -> Result<f64> {
        if self.identity {
            return Ok(1.0);
        }
        let t1 = self.time_map(t2)?;
        Ok(self.radius(&*self.basis2, t2)?.0 / self.radius(&*self.basis1, t1)?.0)
    }
    fn derivative(&self, t2: f64) -> Result<f64> {
        if self.identity {
            return Ok(0.0);
        }
        let t1 = self.time_map(t2)?;
        let (r2, r2d) = self.radius(&*self.basis2, t2)?;
        let (r1, r1d) = self.radius(&*self.basis1, t1)?;
        let b = r2 / r1;
        let t1_dot = self.w2(t2) / (b * b * self.w1(t1));
        Ok(r2d / r1 - r2 * r1d * t1_dot / (r1 * r1))
    }
    fn timescale(&self) -> f64 {
        self.basis2.system().timescale()
    }
}

impl AeptMap for ComposedMap {
    fn system1(&self) -> &LsodeSystem {
        self.basis1.system()
    }
    fn system2(&self) -> &LsodeSystem {
        self.basis2.system()
    }
    fn time_map(&self, t2: f64) -> Result<f64> {
        if self.identity {
            self.track2.theta(t2)?;
            return Ok(t2);
        }
        self.track1.invert(self.track2.theta(t2)?)
    }
    fn inverse_time_map(&self, t1: f64) -> Result<f64> {
        if self.identity {
            self.track2.theta(t1)?;
            return Ok(t1);
        }
        self.track2.invert(self.track1.theta(t1)?)
    }
    fn omega0(&self) -> f64 {
        self.omega0
    }
    fn span(&self) -> (f64, f64) {
        self.track2.span()
    }
    fn basis1(&self) -> Option<&dyn ClassicalBasis> {
        Some(&*self.basis1)
    }
    fn as_profile(&self) -> &dyn Profile {
        self
    }
}

/// Map onto the undamped oscillator of frequency `ω₀` with
/// `b = √(ũ2² + ω₀²u1²)`, `ũ2 = u2 − γ̃u1/2`, and `t₁ = θ/ω₀` where `θ` is
/// the unwrapped `atan2(ω₀u1, ũ2)`. With `γ̃ = 0` this is the arctangent time
/// map `(1/ω₀)·atan(ω₀τ)` continued by `π/ω₀` across every zero of `u2`.
#[derive(Debug, Clone)]
pub struct HarmonicAuxMap {
    basis: BasisRef,
    omega0: f64,
    gamma_tilde: f64,
    system1: LsodeSystem,
    track: AngleTrack,
}

impl HarmonicAuxMap {
    pub fn new(basis: BasisRef, omega0: f64, gamma_tilde: f64, horizon: (f64, f64)) -> Result<Self> {
        if !(omega0 > 0.0) {
            return Err(invalid(format!("auxiliary frequency must be positive, got {omega0}")));
        }
        let system1 = LsodeSystem::harmonic(omega0, basis.system().mass())?;
        let (lo, hi) = clip_span(basis.span(), horizon);
        let h = 0.05 * basis.system().timescale().min(1.0 / omega0);
        let curve = polar_curve(basis.clone(), omega0, 0.5 * gamma_tilde);
        let track = AngleTrack::build(curve, lo, hi, h, Coverage::NONE)?;
        Ok(Self { basis, omega0, gamma_tilde, system1, track })
    }

    pub fn gamma_tilde(&self) -> f64 {
        self.gamma_tilde
    }

    pub fn basis(&self) -> &BasisRef {
        &self.basis
    }

    /// Unwrapped angle `θ(t)`, zero at `t = 0`.
    pub fn angle(&self, t: f64) -> Result<f64> {
        self.track.theta(t)
    }

    fn parts(&self, t: f64) -> Result<[f64; 6]> {
        let p = self.basis.eval(t)?;
        let g = 0.5 * self.gamma_tilde;
        let w = self.omega0;
        Ok([p.u2 - g * p.u1, p.u2_dot - g * p.u1_dot, w * p.u1, w * p.u1_dot, p.u1, p.u2])
    }
}

impl Profile for HarmonicAuxMap {
    fn value(&self, t: f64) -> Result<f64> {
        let [x, _, y, ..] = self.parts(t)?;
        Ok(x.hypot(y))
    }
    fn derivative(&self, t: f64) -> Result<f64> {
        let [x, xd, y, yd, ..] = self.parts(t)?;
        Ok((x * xd + y * yd) / x.hypot(y))
    }
    fn second_derivative(&self, t: f64) -> Result<f64> {
        let [x, xd, y, yd, ..] = self.parts(t)?;
        let (a1, a2, _) = self.basis.accelerations(t)?;
        let (xdd, ydd) = (a2 - 0.5 * self.gamma_tilde * a1, self.omega0 * a1);
        let b = x.hypot(y);
        let bd = (x * xd + y * yd) / b;
        Ok((xd * xd + x * xdd + yd * yd + y * ydd - bd * bd) / b)
    }
    fn timescale(&self) -> f64 {
        self.basis.system().timescale()
    }
}

impl AeptMap for HarmonicAuxMap {
    fn system1(&self) -> &LsodeSystem {
        &self.system1
    }
    fn system2(&self) -> &LsodeSystem {
        self.basis.system()
    }
    fn time_map(&self, t2: f64) -> Result<f64> {
        Ok(self.track.theta(t2)? / self.omega0)
    }
    fn inverse_time_map(&self, t1: f64) -> Result<f64> {
        self.track.invert(self.omega0 * t1)
    }
    fn omega0(&self) -> f64 {
        self.omega0
    }
    fn span(&self) -> (f64, f64) {
        self.track.span()
    }
    fn as_profile(&self) -> &dyn Profile {
        self
    }
}

/// Unwrapped `(1/ω₀)·atan(ω₀τ)` at a single time.
pub fn time_map_arctan(basis: BasisRef, omega0: f64, t: f64) -> Result<f64> {
    let horizon = (t.min(0.0), t.max(0.0));
    HarmonicAuxMap::new(basis, omega0, 0.0, horizon)?.time_map(t)
}

/// The `b = W₂^{1/2}` map onto an undamped system with
/// `ω₁² = ω₂² − ḟ₂²/4 − f̈₂/2`; the time map is the identity.
#[derive(Debug, Clone)]
pub struct WronskianMap {
    profile: WronskianProfile,
    system1: LsodeSystem,
}

impl WronskianMap {
    pub fn new(sys2: &LsodeSystem) -> Result<Self> {
        let aux = EngineeredUndamped { base: sys2.clone() };
        let system1 = LsodeSystem::new(Arc::new(aux), sys2.mass())?;
        Ok(Self { profile: WronskianProfile { system: sys2.clone() }, system1 })
    }

    pub fn profile(&self) -> &WronskianProfile {
        &self.profile
    }
}

pub fn engineer_b_from_wronskian(sys2: &LsodeSystem) -> Result<(WronskianProfile, LsodeSystem)> {
    let map = WronskianMap::new(sys2)?;
    Ok((map.profile, map.system1))
}

impl Profile for WronskianMap {
    fn value(&self, t: f64) -> Result<f64> {
        self.profile.value(t)
    }
    fn derivative(&self, t: f64) -> Result<f64> {
        self.profile.derivative(t)
    }
    fn second_derivative(&self, t: f64) -> Result<f64> {
        self.profile.second_derivative(t)
    }
    fn timescale(&self) -> f64 {
        self.profile.timescale()
    }
}

impl AeptMap for WronskianMap {
    fn system1(&self) -> &LsodeSystem {
        &self.system1
    }
    fn system2(&self) -> &LsodeSystem {
        &self.profile.system
    }
    fn time_map(&self, t2: f64) -> Result<f64> {
        self.profile.system.check_time(t2)?;
        Ok(t2)
    }
    fn inverse_time_map(&self, t1: f64) -> Result<f64> {
        self.profile.system.check_time(t1)?;
        Ok(t1)
    }
    fn omega0(&self) -> f64 {
        self.system1.omega_sq(0.0).max(0.0).sqrt()
    }
    fn span(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
    fn as_profile(&self) -> &dyn Profile {
        self
    }
}
