use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::specfun::{kummer_1f1, kummer_1f1_dz, SeriesControl};

use super::system::LsodeSystem;

/// Canonical basis sample at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisPoint {
    pub t: f64,
    pub u1: f64,
    pub u1_dot: f64,
    pub u2: f64,
    pub u2_dot: f64,
    pub up: f64,
    pub up_dot: f64,
}

impl BasisPoint {
    pub fn wronskian(&self) -> f64 {
        self.u1_dot * self.u2 - self.u1 * self.u2_dot
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisSource {
    Numeric,
    ClosedForm,
}

/// A canonical solution basis `u1, u2, up` of an LSODE.
pub trait ClassicalBasis: Send + Sync + fmt::Debug {
    fn eval(&self, t: f64) -> Result<BasisPoint>;
    fn system(&self) -> &LsodeSystem;
    fn source(&self) -> BasisSource;
    fn span(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
    /// Sample times for numeric bases; empty for closed forms.
    fn t_grid(&self) -> &[f64] {
        &[]
    }
    /// Second derivatives `(ü1, ü2, üp)` from the equation of motion.
    fn accelerations(&self, t: f64) -> Result<(f64, f64, f64)> {
        let p = self.eval(t)?;
        let sys = self.system();
        let (fd, w2) = (sys.fdot(t), sys.omega_sq(t));
        Ok((
            -fd * p.u1_dot - w2 * p.u1,
            -fd * p.u2_dot - w2 * p.u2,
            sys.lambda(t) - fd * p.up_dot - w2 * p.up,
        ))
    }
}

pub type BasisRef = Arc<dyn ClassicalBasis>;

pub fn wronskian(basis: &dyn ClassicalBasis, t: f64) -> Result<f64> {
    Ok(basis.eval(t)?.wronskian())
}

fn homogeneous(t: f64, u1: f64, u1_dot: f64, u2: f64, u2_dot: f64) -> BasisPoint {
    BasisPoint { t, u1, u1_dot, u2, u2_dot, up: 0.0, up_dot: 0.0 }
}

#[derive(Debug, Clone)]
pub struct FreeBasis {
    system: LsodeSystem,
}

impl FreeBasis {
    pub fn new(mass: f64) -> Result<Self> {
        Ok(Self { system: LsodeSystem::new(Arc::new(super::system::Free), mass)? })
    }
}

impl ClassicalBasis for FreeBasis {
    fn eval(&self, t: f64) -> Result<BasisPoint> {
        Ok(homogeneous(t, t, 1.0, 1.0, 0.0))
    }
    fn system(&self) -> &LsodeSystem {
        &self.system
    }
    fn source(&self) -> BasisSource {
        BasisSource::ClosedForm
    }
}

#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    omega0: f64,
    system: LsodeSystem,
}

impl HarmonicBasis {
    pub fn new(omega0: f64, mass: f64) -> Result<Self> {
        Ok(Self { omega0, system: LsodeSystem::harmonic(omega0, mass)? })
    }
    pub fn omega0(&self) -> f64 {
        self.omega0
    }
}

impl ClassicalBasis for HarmonicBasis {
    fn eval(&self, t: f64) -> Result<BasisPoint> {
        let w = self.omega0;
        let (s, c) = (w * t).sin_cos();
        Ok(homogeneous(t, s / w, c, c, -w * s))
    }
    fn system(&self) -> &LsodeSystem {
        &self.system
    }
    fn source(&self) -> BasisSource {
        BasisSource::ClosedForm
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CkRegime {
    /// `Ω = √(ω² − γ²/4) > 0`.
    Underdamped { big_omega: f64 },
    Critical,
    /// `κ = √(γ²/4 − ω²) > 0`.
    Overdamped { kappa: f64 },
}

/// Closed-form basis of the constant-coefficient damped oscillator.
#[derive(Debug, Clone)]
pub struct CkBasis {
    pub gamma: f64,
    pub omega: f64,
    pub regime: CkRegime,
    system: LsodeSystem,
}

/// Builds the closed-form damped-oscillator basis, choosing the
/// trigonometric, critical or hyperbolic branch from `ω` against `γ/2`.
pub fn closed_form_ck(gamma: f64, omega: f64, m: f64) -> Result<CkBasis> {
    let system = LsodeSystem::caldirola_kanai(gamma, omega, m)?;
    let g = 0.5 * gamma;
    let d = omega * omega - g * g;
    let scale = (omega * omega).max(g * g).max(f64::MIN_POSITIVE);
    let regime = if d.abs() <= 1e-14 * scale {
        CkRegime::Critical
    } else if d > 0.0 {
        CkRegime::Underdamped { big_omega: d.sqrt() }
    } else {
        CkRegime::Overdamped { kappa: (-d).sqrt() }
    };
    Ok(CkBasis { gamma, omega, regime, system })
}

impl ClassicalBasis for CkBasis {
    fn eval(&self, t: f64) -> Result<BasisPoint> {
        let g = 0.5 * self.gamma;
        let w2 = self.omega * self.omega;
        let e = (-g * t).exp();
        let p = match self.regime {
            CkRegime::Underdamped { big_omega: om } => {
                let (s, c) = (om * t).sin_cos();
                homogeneous(t, e * s / om, e * (c - g * s / om), e * (c + g * s / om), -e * s * w2 / om)
            }
            CkRegime::Critical => homogeneous(t, t * e, e * (1.0 - g * t), e * (1.0 + g * t), -g * g * t * e),
            CkRegime::Overdamped { kappa: k } => {
                let (s, c) = ((k * t).sinh(), (k * t).cosh());
                homogeneous(t, e * s / k, e * (c - g * s / k), e * (c + g * s / k), -e * s * w2 / k)
            }
        };
        Ok(p)
    }
    fn system(&self) -> &LsodeSystem {
        &self.system
    }
    fn source(&self) -> BasisSource {
        BasisSource::ClosedForm
    }
}

/// Confluent-hypergeometric basis of `ẍ + αtẋ + ω²x = 0`.
#[derive(Debug, Clone)]
pub struct HermiteBasis {
    pub alpha: f64,
    pub omega: f64,
    ctl: SeriesControl,
    system: LsodeSystem,
}

pub fn closed_form_hermite(alpha: f64, omega: f64, m: f64, ctl: SeriesControl) -> Result<HermiteBasis> {
    if !(alpha > 0.0) {
        return Err(invalid(format!("Hermite basis needs alpha > 0, got {alpha}")));
    }
    Ok(HermiteBasis { alpha, omega, ctl, system: LsodeSystem::hermite(alpha, omega, m)? })
}

impl ClassicalBasis for HermiteBasis {
    fn eval(&self, t: f64) -> Result<BasisPoint> {
        let a2 = self.omega * self.omega / (2.0 * self.alpha);
        let z = -0.5 * self.alpha * t * t;
        let dz = -self.alpha * t;
        let ctl = &self.ctl;
        let m1 = kummer_1f1(0.5 + a2, 1.5, z, ctl)?;
        let m1z = kummer_1f1_dz(0.5 + a2, 1.5, z, ctl)?;
        let m2 = kummer_1f1(a2, 0.5, z, ctl)?;
        let m2z = kummer_1f1_dz(a2, 0.5, z, ctl)?;
        Ok(homogeneous(t, t * m1, m1 + t * m1z * dz, m2, m2z * dz))
    }
    fn system(&self) -> &LsodeSystem {
        &self.system
    }
    fn source(&self) -> BasisSource {
        BasisSource::ClosedForm
    }
}

/// `ũ2 = u2 − γ̃u1/2` together with its derivative.
#[derive(Debug, Clone)]
pub struct TildeU2 {
    basis: BasisRef,
    gamma_tilde: f64,
}

impl TildeU2 {
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        let p = self.basis.eval(t)?;
        let g = 0.5 * self.gamma_tilde;
        Ok((p.u2 - g * p.u1, p.u2_dot - g * p.u1_dot))
    }
    pub fn gamma_tilde(&self) -> f64 {
        self.gamma_tilde
    }
}

pub fn tilde_u2(basis: BasisRef, gamma_tilde: f64) -> TildeU2 {
    TildeU2 { basis, gamma_tilde }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::second5;
    use crate::specfun::erfi;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn lsode_residuals(b: &dyn ClassicalBasis, t: f64) -> (f64, f64) {
        let sys = b.system();
        let h = 1e-3;
        let u1dd = second5(|s| Ok(b.eval(s)?.u1), t, h).unwrap();
        let u2dd = second5(|s| Ok(b.eval(s)?.u2), t, h).unwrap();
        let p = b.eval(t).unwrap();
        (
            u1dd + sys.fdot(t) * p.u1_dot + sys.omega_sq(t) * p.u1,
            u2dd + sys.fdot(t) * p.u2_dot + sys.omega_sq(t) * p.u2,
        )
    }

    fn assert_canonical(b: &dyn ClassicalBasis) {
        let p = b.eval(0.0).unwrap();
        assert!(p.u1.abs() <= 1e-12 && p.u2_dot.abs() <= 1e-12);
        assert!((p.u2 - 1.0).abs() <= 1e-12 && (p.u1_dot - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn ck_quarter_period_undamped() {
        let b = closed_form_ck(0.0, 1.0, 1.0).unwrap();
        let p = b.eval(FRAC_PI_2).unwrap();
        assert!((p.u1 - 1.0).abs() < 1e-15);
        assert!(p.u2.abs() < 1e-15);
    }

    #[test]
    fn ck_big_omega_and_wronskian() {
        let b = closed_form_ck(0.4, 1.0, 1.0).unwrap();
        match b.regime {
            CkRegime::Underdamped { big_omega } => assert!((big_omega - 0.96f64.sqrt()).abs() < 1e-15),
            _ => panic!("expected underdamped"),
        }
        assert!((wronskian(&b, 2.0).unwrap() - (-0.8f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn ck_all_branches_are_canonical_solutions() {
        for &(g, w) in &[(0.4, 1.0), (2.0, 1.0), (3.0, 1.0), (0.0, 2.5)] {
            let b = closed_form_ck(g, w, 1.0).unwrap();
            assert_canonical(&b);
            for &t in &[0.3, 1.7, 4.2] {
                let (r1, r2) = lsode_residuals(&b, t);
                assert!(r1.abs() < 1e-6 && r2.abs() < 1e-6, "({g},{w}) t={t}: {r1} {r2}");
                let wr = wronskian(&b, t).unwrap();
                assert!((wr - (-g * t).exp()).abs() < 1e-13);
            }
        }
        let crit = closed_form_ck(2.0, 1.0, 1.0).unwrap();
        assert_eq!(crit.regime, CkRegime::Critical);
        assert!((crit.eval(1.5).unwrap().u1 - 1.5 * (-1.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn hermite_basis_canonical_and_wronskian() {
        let b = closed_form_hermite(0.5, 1.0, 1.0, SeriesControl::default()).unwrap();
        assert_canonical(&b);
        assert!((wronskian(&b, 1.0).unwrap() - (-0.25f64).exp()).abs() < 1e-11);
        for &t in &[0.5, 2.0, 5.0, -3.0] {
            let (r1, r2) = lsode_residuals(&b, t);
            assert!(r1.abs() < 1e-6 && r2.abs() < 1e-6, "t={t}: {r1} {r2}");
        }
    }

    #[test]
    fn hermite_critical_case_matches_erfi_form() {
        let w = 1.3;
        let b = closed_form_hermite(w * w, w, 1.0, SeriesControl::default()).unwrap();
        let ctl = SeriesControl::default();
        for &t in &[0.2, 1.0, 2.1] {
            let p = b.eval(t).unwrap();
            let g = (-0.5 * w * w * t * t).exp();
            assert!((p.u2 - g).abs() < 1e-12);
            let u1 = (PI / 2.0).sqrt() / w * g * erfi(w * t / 2f64.sqrt(), &ctl).unwrap();
            assert!((p.u1 - u1).abs() < 1e-11, "t={t}: {} vs {u1}", p.u1);
        }
    }

    #[test]
    fn tilde_u2_ck_is_damped_cosine() {
        let b: BasisRef = Arc::new(closed_form_ck(0.4, 1.0, 1.0).unwrap());
        let tu = tilde_u2(b.clone(), 0.4);
        let om = 0.96f64.sqrt();
        let (v0, d0) = tu.eval(0.0).unwrap();
        assert!((v0 - 1.0).abs() < 1e-15 && (d0 + 0.2).abs() < 1e-15);
        for &t in &[0.5, 3.0, 7.0] {
            let (v, _) = tu.eval(t).unwrap();
            assert!((v - (-0.2 * t).exp() * (om * t).cos()).abs() < 1e-14);
        }
        let plain = tilde_u2(b.clone(), 0.0);
        assert_eq!(plain.eval(1.1).unwrap().0, b.eval(1.1).unwrap().u2);
    }
}
