use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::numerics::diff5;
use crate::specfun::SeriesControl;

use super::basis::{closed_form_ck, closed_form_hermite, BasisRef, FreeBasis, HarmonicBasis};

/// Coefficient functions of `ẍ + ḟ(t)ẋ + ω²(t)x = Λ(t)`.
///
/// Implementors store `f` explicitly with the gauge `f(0) = 0`, so the
/// Wronskian of a canonical basis starts at one.
pub trait Coefficients: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    fn fdot(&self, t: f64) -> f64;
    fn f(&self, t: f64) -> f64;
    fn fddot(&self, t: f64) -> f64 {
        diff5(|s| Ok(self.fdot(s)), t, 1e-4).unwrap_or(f64::NAN)
    }
    fn omega_sq(&self, t: f64) -> f64;
    fn lambda(&self, _t: f64) -> f64 {
        0.0
    }
    fn is_forced(&self) -> bool {
        false
    }
    fn check_time(&self, _t: f64) -> Result<()> {
        Ok(())
    }
    /// Characteristic time used to pick scan and difference steps.
    fn timescale(&self) -> f64 {
        1.0
    }
    fn closed_form(&self, _mass: f64, _ctl: &SeriesControl) -> Option<Result<BasisRef>> {
        None
    }
}

#[derive(Clone)]
pub struct LsodeSystem {
    coeffs: Arc<dyn Coefficients>,
    mass: f64,
}

impl fmt::Debug for LsodeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LsodeSystem").field("coeffs", &self.coeffs).field("mass", &self.mass).finish()
    }
}

impl LsodeSystem {
    pub fn new(coeffs: Arc<dyn Coefficients>, mass: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(invalid(format!("mass must be positive, got {mass}")));
        }
        let f0 = coeffs.f(0.0);
        if f0.abs() > 1e-14 {
            return Err(invalid(format!("f(0) must vanish, got {f0}")));
        }
        Ok(Self { coeffs, mass })
    }

    pub fn free(mass: f64) -> Self {
        Self::new(Arc::new(Free), mass).expect("valid")
    }

    pub fn harmonic(omega0: f64, mass: f64) -> Result<Self> {
        Self::new(Arc::new(Harmonic::new(omega0)?), mass)
    }

    pub fn caldirola_kanai(gamma: f64, omega: f64, mass: f64) -> Result<Self> {
        Self::new(Arc::new(CaldirolaKanai::new(gamma, omega)?), mass)
    }

    pub fn hermite(alpha: f64, omega: f64, mass: f64) -> Result<Self> {
        Self::new(Arc::new(HermiteOscillator::new(alpha, omega)?), mass)
    }

    pub fn coefficients(&self) -> &Arc<dyn Coefficients> {
        &self.coeffs
    }
    pub fn name(&self) -> &str {
        self.coeffs.name()
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn fdot(&self, t: f64) -> f64 {
        self.coeffs.fdot(t)
    }
    pub fn f(&self, t: f64) -> f64 {
        self.coeffs.f(t)
    }
    pub fn fddot(&self, t: f64) -> f64 {
        self.coeffs.fddot(t)
    }
    pub fn omega_sq(&self, t: f64) -> f64 {
        self.coeffs.omega_sq(t)
    }
    pub fn lambda(&self, t: f64) -> f64 {
        self.coeffs.lambda(t)
    }
    pub fn is_forced(&self) -> bool {
        self.coeffs.is_forced()
    }
    pub fn check_time(&self, t: f64) -> Result<()> {
        self.coeffs.check_time(t)
    }
    pub fn timescale(&self) -> f64 {
        self.coeffs.timescale()
    }
    /// `W(t) = e^{-f(t)}` for any canonical basis of this system.
    pub fn wronskian(&self, t: f64) -> f64 {
        (-self.coeffs.f(t)).exp()
    }
    /// Closed-form canonical basis when the family has one.
    pub fn closed_form(&self, ctl: &SeriesControl) -> Option<Result<BasisRef>> {
        self.coeffs.closed_form(self.mass, ctl)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Free;

impl Coefficients for Free {
    fn name(&self) -> &str {
        "free"
    }
    fn fdot(&self, _t: f64) -> f64 {
        0.0
    }
    fn f(&self, _t: f64) -> f64 {
        0.0
    }
    fn fddot(&self, _t: f64) -> f64 {
        0.0
    }
    fn omega_sq(&self, _t: f64) -> f64 {
        0.0
    }
    fn closed_form(&self, mass: f64, _ctl: &SeriesControl) -> Option<Result<BasisRef>> {
        Some(FreeBasis::new(mass).map(|b| Arc::new(b) as BasisRef))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Harmonic {
    pub omega0: f64,
}

impl Harmonic {
    pub fn new(omega0: f64) -> Result<Self> {
        if !(omega0 > 0.0) {
            return Err(invalid(format!("harmonic frequency must be positive, got {omega0}")));
        }
        Ok(Self { omega0 })
    }
}

impl Coefficients for Harmonic {
    fn name(&self) -> &str {
        "harmonic"
    }
    fn fdot(&self, _t: f64) -> f64 {
        0.0
    }
    fn f(&self, _t: f64) -> f64 {
        0.0
    }
    fn fddot(&self, _t: f64) -> f64 {
        0.0
    }
    fn omega_sq(&self, _t: f64) -> f64 {
        self.omega0 * self.omega0
    }
    fn timescale(&self) -> f64 {
        1.0 / self.omega0
    }
    fn closed_form(&self, mass: f64, _ctl: &SeriesControl) -> Option<Result<BasisRef>> {
        Some(HarmonicBasis::new(self.omega0, mass).map(|b| Arc::new(b) as BasisRef))
    }
}

/// Constant damping `γ` and frequency `ω`.
#[derive(Debug, Clone, Copy)]
pub struct CaldirolaKanai {
    pub gamma: f64,
    pub omega: f64,
}

impl CaldirolaKanai {
    pub fn new(gamma: f64, omega: f64) -> Result<Self> {
        if !(gamma >= 0.0 && omega >= 0.0) {
            return Err(invalid("Caldirola-Kanai needs gamma >= 0 and omega >= 0"));
        }
        Ok(Self { gamma, omega })
    }
}

impl Coefficients for CaldirolaKanai {
    fn name(&self) -> &str {
        "caldirola_kanai"
    }
    fn fdot(&self, _t: f64) -> f64 {
        self.gamma
    }
    fn f(&self, t: f64) -> f64 {
        self.gamma * t
    }
    fn fddot(&self, _t: f64) -> f64 {
        0.0
    }
    fn omega_sq(&self, _t: f64) -> f64 {
        self.omega * self.omega
    }
    fn timescale(&self) -> f64 {
        1.0 / self.omega.max(0.5 * self.gamma).max(1e-3)
    }
    fn closed_form(&self, mass: f64, _ctl: &SeriesControl) -> Option<Result<BasisRef>> {
        Some(closed_form_ck(self.gamma, self.omega, mass).map(|b| Arc::new(b) as BasisRef))
    }
}

/// Damping rate linear in time, `ḟ = αt`.
#[derive(Debug, Clone, Copy)]
pub struct HermiteOscillator {
    pub alpha: f64,
    pub omega: f64,
}

impl HermiteOscillator {
    pub fn new(alpha: f64, omega: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(invalid(format!("Hermite oscillator needs alpha > 0, got {alpha}")));
        }
        Ok(Self { alpha, omega })
    }
}

impl Coefficients for HermiteOscillator {
    fn name(&self) -> &str {
        "hermite"
    }
    fn fdot(&self, t: f64) -> f64 {
        self.alpha * t
    }
    fn f(&self, t: f64) -> f64 {
        0.5 * self.alpha * t * t
    }
    fn fddot(&self, _t: f64) -> f64 {
        self.alpha
    }
    fn omega_sq(&self, _t: f64) -> f64 {
        self.omega * self.omega
    }
    fn timescale(&self) -> f64 {
        1.0 / self.omega.abs().max(self.alpha.sqrt())
    }
    fn closed_form(&self, mass: f64, ctl: &SeriesControl) -> Option<Result<BasisRef>> {
        Some(closed_form_hermite(self.alpha, self.omega, mass, *ctl).map(|b| Arc::new(b) as BasisRef))
    }
}

/// `ẍ + μ/(1+νt) ẋ + ω₀²x = 0`.
///
/// The coefficients are singular at `t = −1/ν`; no continuation to negative
/// times is attempted, so anything below zero is a domain violation.
#[derive(Debug, Clone, Copy)]
pub struct LaneEmden {
    pub mu: f64,
    pub nu: f64,
    pub omega0: f64,
}

impl Coefficients for LaneEmden {
    fn name(&self) -> &str {
        "lane_emden"
    }
    fn fdot(&self, t: f64) -> f64 {
        self.mu / (1.0 + self.nu * t)
    }
    fn f(&self, t: f64) -> f64 {
        self.mu / self.nu * (self.nu * t).ln_1p()
    }
    fn fddot(&self, t: f64) -> f64 {
        let s = 1.0 + self.nu * t;
        -self.mu * self.nu / (s * s)
    }
    fn omega_sq(&self, _t: f64) -> f64 {
        self.omega0 * self.omega0
    }
    fn check_time(&self, t: f64) -> Result<()> {
        if t <= -1.0 / self.nu || t < 0.0 {
            Err(Error::DomainViolation { t })
        } else {
            Ok(())
        }
    }
    fn timescale(&self) -> f64 {
        1.0 / self.omega0.abs().max(1e-3)
    }
}

pub fn lane_emden_system(mu: f64, nu: f64, omega0: f64, m: f64) -> Result<LsodeSystem> {
    if !(nu > 0.0) {
        return Err(invalid(format!("Lane-Emden needs nu > 0, got {nu}")));
    }
    LsodeSystem::new(Arc::new(LaneEmden { mu, nu, omega0 }), m)
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Coefficients from closures; `f` must be the antiderivative of `fdot`
/// vanishing at zero.
#[derive(Clone)]
pub struct FnCoefficients {
    pub label: String,
    pub fdot: ScalarFn,
    pub f: ScalarFn,
    pub omega_sq: ScalarFn,
    pub lambda: Option<ScalarFn>,
}

impl fmt::Debug for FnCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnCoefficients").field("label", &self.label).finish_non_exhaustive()
    }
}

impl FnCoefficients {
    /// Undamped oscillator with frequency `ω²(t)`.
    pub fn undamped(label: impl Into<String>, omega_sq: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            fdot: Arc::new(|_| 0.0),
            f: Arc::new(|_| 0.0),
            omega_sq: Arc::new(omega_sq),
            lambda: None,
        }
    }
}

impl Coefficients for FnCoefficients {
    fn name(&self) -> &str {
        &self.label
    }
    fn fdot(&self, t: f64) -> f64 {
        (self.fdot)(t)
    }
    fn f(&self, t: f64) -> f64 {
        (self.f)(t)
    }
    fn omega_sq(&self, t: f64) -> f64 {
        (self.omega_sq)(t)
    }
    fn lambda(&self, t: f64) -> f64 {
        self.lambda.as_ref().map_or(0.0, |l| l(t))
    }
    fn is_forced(&self) -> bool {
        self.lambda.is_some()
    }
}

/// Undamped auxiliary system reached by the `b = W^{1/2}` map:
/// `ω₁² = ω₂² − ḟ₂²/4 − f̈₂/2`.
#[derive(Debug, Clone)]
pub struct EngineeredUndamped {
    pub base: LsodeSystem,
}

impl Coefficients for EngineeredUndamped {
    fn name(&self) -> &str {
        "engineered"
    }
    fn fdot(&self, _t: f64) -> f64 {
        0.0
    }
    fn f(&self, _t: f64) -> f64 {
        0.0
    }
    fn fddot(&self, _t: f64) -> f64 {
        0.0
    }
    fn omega_sq(&self, t: f64) -> f64 {
        let fd = self.base.fdot(t);
        self.base.omega_sq(t) - 0.25 * fd * fd - 0.5 * self.base.fddot(t)
    }
    fn check_time(&self, t: f64) -> Result<()> {
        self.base.check_time(t)
    }
    fn timescale(&self) -> f64 {
        self.base.timescale()
    }
}

/// Piecewise-linear tabulated coefficients. `f` is the exact integral of the
/// interpolated `ḟ`, so `f(0) = 0` holds by construction.
#[derive(Debug, Clone)]
pub struct Tabulated {
    t: Vec<f64>,
    fdot: Vec<f64>,
    omega_sq: Vec<f64>,
    lambda: Vec<f64>,
    f_nodes: Vec<f64>,
}

impl Tabulated {
    pub fn new(t: Vec<f64>, fdot: Vec<f64>, omega_sq: Vec<f64>, lambda: Vec<f64>) -> Result<Self> {
        let n = t.len();
        if n < 2 || fdot.len() != n || omega_sq.len() != n || lambda.len() != n {
            return Err(invalid("tabulated columns must share a length of at least 2"));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("tabulated times must be strictly increasing"));
        }
        if t[0] > 0.0 || t[n - 1] < 0.0 {
            return Err(invalid("tabulated span must contain t = 0"));
        }
        let mut cum = vec![0.0; n];
        for i in 1..n {
            cum[i] = cum[i - 1] + 0.5 * (fdot[i] + fdot[i - 1]) * (t[i] - t[i - 1]);
        }
        let mut tab = Self { t, fdot, omega_sq, lambda, f_nodes: cum };
        let shift = tab.integral_from_start(0.0);
        for v in &mut tab.f_nodes {
            *v -= shift;
        }
        Ok(tab)
    }

    /// Reads `t,fdot,omega_sq,lambda` rows; a non-numeric first line is a header.
    pub fn from_csv(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let (mut t, mut fd, mut w2, mut l) = (vec![], vec![], vec![], vec![]);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed: std::result::Result<Vec<f64>, _> = cols.iter().map(|c| c.parse::<f64>()).collect();
            match parsed {
                Ok(v) if v.len() >= 3 => {
                    t.push(v[0]);
                    fd.push(v[1]);
                    w2.push(v[2]);
                    l.push(v.get(3).copied().unwrap_or(0.0));
                }
                _ if lineno == 0 => continue,
                _ => return Err(invalid(format!("{}: bad row {}", path.display(), lineno + 1))),
            }
        }
        Self::new(t, fd, w2, l)
    }

    fn locate(&self, t: f64) -> usize {
        let n = self.t.len();
        match self.t.partition_point(|&s| s <= t) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        }
    }

    fn lerp(&self, col: &[f64], t: f64) -> f64 {
        let i = self.locate(t);
        let s = (t - self.t[i]) / (self.t[i + 1] - self.t[i]);
        col[i] + s * (col[i + 1] - col[i])
    }

    fn integral_from_start(&self, t: f64) -> f64 {
        let i = self.locate(t);
        let dt = t - self.t[i];
        let slope = (self.fdot[i + 1] - self.fdot[i]) / (self.t[i + 1] - self.t[i]);
        self.f_nodes[i] + self.fdot[i] * dt + 0.5 * slope * dt * dt
    }

    pub fn span(&self) -> (f64, f64) {
        (self.t[0], self.t[self.t.len() - 1])
    }
}

impl Coefficients for Tabulated {
    fn name(&self) -> &str {
        "custom"
    }
    fn fdot(&self, t: f64) -> f64 {
        self.lerp(&self.fdot, t)
    }
    fn f(&self, t: f64) -> f64 {
        self.integral_from_start(t)
    }
    fn fddot(&self, t: f64) -> f64 {
        let i = self.locate(t);
        (self.fdot[i + 1] - self.fdot[i]) / (self.t[i + 1] - self.t[i])
    }
    fn omega_sq(&self, t: f64) -> f64 {
        self.lerp(&self.omega_sq, t)
    }
    fn lambda(&self, t: f64) -> f64 {
        self.lerp(&self.lambda, t)
    }
    fn is_forced(&self) -> bool {
        self.lambda.iter().any(|&v| v != 0.0)
    }
    fn check_time(&self, t: f64) -> Result<()> {
        let (lo, hi) = self.span();
        if t < lo || t > hi {
            Err(Error::OutOfSpan { t, lo, hi })
        } else {
            Ok(())
        }
    }
}
