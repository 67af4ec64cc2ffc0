//! Scale functions `b(t)` and the Ermakov machinery built on them.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::lsode::{BasisRef, ClassicalBasis, LsodeSystem};
use crate::numerics::diff5;

/// A scalar function with two derivatives.
pub trait Profile: Send + Sync + fmt::Debug {
    fn value(&self, t: f64) -> Result<f64>;
    fn derivative(&self, t: f64) -> Result<f64>;
    fn second_derivative(&self, t: f64) -> Result<f64> {
        diff5(|s| self.derivative(s), t, 1e-4 * self.timescale())
    }
    fn timescale(&self) -> f64 {
        1.0
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantProfile(pub f64);

impl Profile for ConstantProfile {
    fn value(&self, _t: f64) -> Result<f64> {
        Ok(self.0)
    }
    fn derivative(&self, _t: f64) -> Result<f64> {
        Ok(0.0)
    }
    fn second_derivative(&self, _t: f64) -> Result<f64> {
        Ok(0.0)
    }
}

/// `b = √(u2² + ω₀²u1²)` with analytic derivatives.
#[derive(Debug, Clone)]
pub struct BFromBasis {
    pub basis: BasisRef,
    pub omega0: f64,
}

pub fn b_from_basis(basis: BasisRef, omega0: f64) -> Result<BFromBasis> {
    if !(omega0 >= 0.0) {
        return Err(invalid(format!("omega0 must be non-negative, got {omega0}")));
    }
    Ok(BFromBasis { basis, omega0 })
}

impl Profile for BFromBasis {
    fn value(&self, t: f64) -> Result<f64> {
        let p = self.basis.eval(t)?;
        Ok(p.u2.hypot(self.omega0 * p.u1))
    }
    fn derivative(&self, t: f64) -> Result<f64> {
        let p = self.basis.eval(t)?;
        let w2 = self.omega0 * self.omega0;
        Ok((p.u2 * p.u2_dot + w2 * p.u1 * p.u1_dot) / p.u2.hypot(self.omega0 * p.u1))
    }
    fn second_derivative(&self, t: f64) -> Result<f64> {
        let p = self.basis.eval(t)?;
        let (a1, a2, _) = self.basis.accelerations(t)?;
        let w2 = self.omega0 * self.omega0;
        let b = p.u2.hypot(self.omega0 * p.u1);
        let bd = (p.u2 * p.u2_dot + w2 * p.u1 * p.u1_dot) / b;
        let q = p.u2_dot * p.u2_dot + p.u2 * a2 + w2 * (p.u1_dot * p.u1_dot + p.u1 * a1);
        Ok((q - bd * bd) / b)
    }
    fn timescale(&self) -> f64 {
        self.basis.system().timescale()
    }
}

/// Quadratic-form coefficients of `b² = c1·u1² + c2·u2² + 2c3·u1u2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinneyCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl PinneyCoefficients {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        if !(c1 * c2 - c3 * c3 >= 0.0) || !(c1 >= 0.0 && c2 >= 0.0) {
            return Err(invalid("Pinney coefficients need c1, c2 >= 0 and c1*c2 - c3^2 >= 0"));
        }
        Ok(Self { c1, c2, c3 })
    }

    /// Completes `c2` so that `c1·c2 − c3² = ω₀²`.
    pub fn for_omega0(omega0: f64, c1: f64, c3: f64) -> Result<Self> {
        if !(c1 > 0.0) {
            return Err(invalid("c1 must be positive"));
        }
        Self::new(c1, (omega0 * omega0 + c3 * c3) / c1, c3)
    }

    pub fn omega0(&self) -> f64 {
        (self.c1 * self.c2 - self.c3 * self.c3).max(0.0).sqrt()
    }
}

/// Pinney superposition over the basis solutions `y1 = u1`, `y2 = u2`.
#[derive(Debug, Clone)]
pub struct PinneyProfile {
    pub basis: BasisRef,
    pub coeffs: PinneyCoefficients,
}

pub fn pinney_superposition(basis: BasisRef, coeffs: PinneyCoefficients) -> PinneyProfile {
    PinneyProfile { basis, coeffs }
}

impl PinneyProfile {
    fn parts(&self, t: f64) -> Result<(f64, f64, f64)> {
        let PinneyCoefficients { c1, c2, c3 } = self.coeffs;
        let p = self.basis.eval(t)?;
        let (a1, a2, _) = self.basis.accelerations(t)?;
        let q = c1 * p.u1 * p.u1 + c2 * p.u2 * p.u2 + 2.0 * c3 * p.u1 * p.u2;
        if !(q > 0.0) {
            return Err(Error::NonPositive { t });
        }
        let qd = 2.0 * (c1 * p.u1 * p.u1_dot + c2 * p.u2 * p.u2_dot + c3 * (p.u1_dot * p.u2 + p.u1 * p.u2_dot));
        let qdd = 2.0
            * (c1 * (p.u1_dot * p.u1_dot + p.u1 * a1)
                + c2 * (p.u2_dot * p.u2_dot + p.u2 * a2)
                + c3 * (a1 * p.u2 + 2.0 * p.u1_dot * p.u2_dot + p.u1 * a2));
        Ok((q, qd, qdd))
    }
}

impl Profile for PinneyProfile {
    fn value(&self, t: f64) -> Result<f64> {
        Ok(self.parts(t)?.0.sqrt())
    }
    fn derivative(&self, t: f64) -> Result<f64> {
        let (q, qd, _) = self.parts(t)?;
        Ok(0.5 * qd / q.sqrt())
    }
    fn second_derivative(&self, t: f64) -> Result<f64> {
        let (q, qd, qdd) = self.parts(t)?;
        let b = q.sqrt();
        let bd = 0.5 * qd / b;
        Ok((0.5 * qdd - bd * bd) / b)
    }
    fn timescale(&self) -> f64 {
        self.basis.system().timescale()
    }
}

/// `b = W^{1/2} = e^{−f/2}`.
#[derive(Debug, Clone)]
pub struct WronskianProfile {
    pub system: LsodeSystem,
}

impl Profile for WronskianProfile {
    fn value(&self, t: f64) -> Result<f64> {
        Ok((-0.5 * self.system.f(t)).exp())
    }
    fn derivative(&self, t: f64) -> Result<f64> {
        Ok(-0.5 * self.system.fdot(t) * self.value(t)?)
    }
    fn second_derivative(&self, t: f64) -> Result<f64> {
        let fd = self.system.fdot(t);
        Ok((0.25 * fd * fd - 0.5 * self.system.fddot(t)) * self.value(t)?)
    }
    fn timescale(&self) -> f64 {
        self.system.timescale()
    }
}

/// Left minus right side of the generalized Ermakov equation
///
/// `b̈ + ḟ₂ḃ + ω₂²b = (W₂²/W₁²) ω₁²(t₁) / b³`
///
/// with system-2 quantities at `t2` and system-1 quantities at `t1`. This is
/// the equation obeyed by `b = u2⁽²⁾(t₂)/u2⁽¹⁾(t₁)` under the time map
/// `W₁dt₁ = W₂dt₂/b²`; it reduces to `b̈ + ω²b = ω₀²/b³` for undamped pairs.
pub fn ermakov_residual(b: &dyn Profile, sys2: &LsodeSystem, sys1: &LsodeSystem, t2: f64, t1: f64) -> Result<f64> {
    let (bv, bd, bdd) = (b.value(t2)?, b.derivative(t2)?, b.second_derivative(t2)?);
    let lhs = bdd + sys2.fdot(t2) * bd + sys2.omega_sq(t2) * bv;
    let (w1, w2) = (sys1.wronskian(t1), sys2.wronskian(t2));
    Ok(lhs - (w2 * w2) / (w1 * w1) / (bv * bv * bv) * sys1.omega_sq(t1))
}

/// Variant whose right side carries the extra bracket term
/// `ḟ₁ (u̇₂⁽¹⁾/u₂⁽¹⁾)(1 − b²W₁/W₂)` next to `ω₁²`. It agrees with
/// [`ermakov_residual`] whenever `ḟ₁ = 0` and is kept for comparison; for a
/// damped system 1 the composed `b` does not satisfy it.
pub fn ermakov_residual_bracketed(
    b: &dyn Profile,
    sys2: &LsodeSystem,
    sys1: &LsodeSystem,
    basis1: &dyn ClassicalBasis,
    t2: f64,
    t1: f64,
) -> Result<f64> {
    let base = ermakov_residual(b, sys2, sys1, t2, t1)?;
    let fd1 = sys1.fdot(t1);
    if fd1 == 0.0 {
        return Ok(base);
    }
    let bv = b.value(t2)?;
    let (w1, w2) = (sys1.wronskian(t1), sys2.wronskian(t2));
    let p = basis1.eval(t1)?;
    let extra = fd1 * (p.u2_dot / p.u2) * (1.0 - bv * bv * w1 / w2);
    Ok(base - (w2 * w2) / (w1 * w1) / (bv * bv * bv) * extra)
}

/// Lewis invariant `(m/2)((ẋb − xḃ)/W)² + ½mω₀²(x/b)²`; `w = 1` gives the
/// undamped form with `p = mẋ`.
pub fn classical_lewis_weighted(x: f64, xdot: f64, b: f64, bdot: f64, m: f64, omega0: f64, w: f64) -> f64 {
    let v = (xdot * b - x * bdot) / w;
    let q = x / b;
    0.5 * m * v * v + 0.5 * m * omega0 * omega0 * q * q
}

pub fn classical_lewis(x: f64, xdot: f64, b: f64, bdot: f64, m: f64, omega0: f64) -> f64 {
    classical_lewis_weighted(x, xdot, b, bdot, m, omega0, 1.0)
}

/// Shared handle for callers that keep profiles in registries.
pub type ProfileRef = Arc<dyn Profile>;
