use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::lsode::LsodeSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumRegime {
    Discrete,
    Continuous,
}

/// Parameters of `P^2/2m + (1/2) m w~^2 X^2 + (g~/2)(XP + PX)/2`.
///
/// `omega_tilde_sq` may be negative; then the spectrum is continuous.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantSpec {
    pub label: String,
    pub omega_tilde_sq: f64,
    pub gamma_tilde: f64,
    pub big_omega_sq: f64,
    pub regime: SpectrumRegime,
}

impl InvariantSpec {
    pub fn new(omega_tilde: f64, gamma_tilde: f64) -> Result<Self> {
        Self::from_squared("custom", omega_tilde * omega_tilde, gamma_tilde)
    }

    pub fn from_squared(label: impl Into<String>, omega_tilde_sq: f64, gamma_tilde: f64) -> Result<Self> {
        if !omega_tilde_sq.is_finite() || !gamma_tilde.is_finite() {
            return Err(invalid(format!("non-finite invariant parameters ({omega_tilde_sq}, {gamma_tilde})")));
        }
        let big = omega_tilde_sq - 0.25 * gamma_tilde * gamma_tilde;
        Ok(Self {
            label: label.into(),
            omega_tilde_sq,
            gamma_tilde,
            big_omega_sq: big,
            regime: if big > 0.0 { SpectrumRegime::Discrete } else { SpectrumRegime::Continuous },
        })
    }

    /// Lewis invariant: `w~ = w0`, `g~ = 0`.
    pub fn lewis(omega0: f64) -> Result<Self> {
        Self::from_squared("lewis", omega0 * omega0, 0.0)
    }

    /// Dodonov--Man'ko invariant of the damped oscillator.
    pub fn dodonov_manko(gamma: f64, omega: f64) -> Result<Self> {
        Self::from_squared("dodonov_manko", omega * omega, gamma)
    }

    pub fn omega_tilde(&self) -> Option<f64> {
        (self.omega_tilde_sq >= 0.0).then(|| self.omega_tilde_sq.sqrt())
    }

    /// `Omega~`, or `ContinuousSpectrum` outside the discrete regime.
    pub fn big_omega(&self) -> Result<f64> {
        match self.regime {
            SpectrumRegime::Discrete => Ok(self.big_omega_sq.sqrt()),
            SpectrumRegime::Continuous => Err(Error::ContinuousSpectrum { omega_sq: self.big_omega_sq }),
        }
    }

    /// `hbar Omega~ (n + 1/2)`.
    pub fn eigenvalue(&self, n: usize, hbar: f64) -> Result<f64> {
        Ok(hbar * self.big_omega()? * (n as f64 + 0.5))
    }
}

/// Invariant obtained by engineering `b = sqrt(W)` for `sys`.
pub fn gdm_from_engineering(sys: &LsodeSystem) -> Result<InvariantSpec> {
    sys.check_time(0.0)?;
    let fdd = sys.fddot(0.0);
    if !fdd.is_finite() {
        return Err(invalid("second derivative of f at 0 is not finite"));
    }
    InvariantSpec::from_squared("gdm", sys.omega_sq(0.0) - 0.5 * fdd, sys.fdot(0.0))
}

pub type InvariantParams = BTreeMap<String, f64>;

/// A named way to pick invariant parameters for a system.
pub trait InvariantKind: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    /// Recognised parameter names.
    fn parameters(&self) -> &'static [&'static str];
    fn resolve(&self, sys: &LsodeSystem, params: &InvariantParams) -> Result<InvariantSpec>;
}

fn natural_omega(sys: &LsodeSystem) -> Result<f64> {
    let w2 = sys.omega_sq(0.0);
    if w2 > 0.0 {
        Ok(w2.sqrt())
    } else {
        Err(invalid(format!("system has omega^2(0) = {w2}; give omega explicitly")))
    }
}

#[derive(Debug)]
struct Lewis;

impl InvariantKind for Lewis {
    fn name(&self) -> &'static str {
        "lewis"
    }
    fn parameters(&self) -> &'static [&'static str] {
        &["omega0"]
    }
    fn resolve(&self, sys: &LsodeSystem, params: &InvariantParams) -> Result<InvariantSpec> {
        let w0 = match params.get("omega0") {
            Some(&w) => w,
            None => natural_omega(sys)?,
        };
        if !(w0 > 0.0) {
            return Err(invalid(format!("lewis omega0 must be positive, got {w0}")));
        }
        InvariantSpec::lewis(w0)
    }
}

#[derive(Debug)]
struct DodonovManko;

impl InvariantKind for DodonovManko {
    fn name(&self) -> &'static str {
        "dodonov_manko"
    }
    fn parameters(&self) -> &'static [&'static str] {
        &["gamma", "omega"]
    }
    fn resolve(&self, sys: &LsodeSystem, params: &InvariantParams) -> Result<InvariantSpec> {
        let gamma = params.get("gamma").copied().unwrap_or_else(|| sys.fdot(0.0));
        let omega = match params.get("omega") {
            Some(&w) => w,
            None => natural_omega(sys)?,
        };
        InvariantSpec::dodonov_manko(gamma, omega)
    }
}

#[derive(Debug)]
struct Gdm;

impl InvariantKind for Gdm {
    fn name(&self) -> &'static str {
        "gdm"
    }
    fn parameters(&self) -> &'static [&'static str] {
        &[]
    }
    fn resolve(&self, sys: &LsodeSystem, _: &InvariantParams) -> Result<InvariantSpec> {
        gdm_from_engineering(sys)
    }
}

#[derive(Debug)]
struct Custom;

impl InvariantKind for Custom {
    fn name(&self) -> &'static str {
        "custom"
    }
    fn parameters(&self) -> &'static [&'static str] {
        &["omega_tilde", "gamma_tilde"]
    }
    fn resolve(&self, _: &LsodeSystem, params: &InvariantParams) -> Result<InvariantSpec> {
        let w = params.get("omega_tilde").ok_or_else(|| invalid("custom invariant needs omega_tilde"))?;
        InvariantSpec::new(*w, params.get("gamma_tilde").copied().unwrap_or(0.0))
    }
}

pub type InvariantKindRef = Arc<dyn InvariantKind>;

#[derive(Debug, Clone)]
pub struct InvariantRegistry {
    kinds: Vec<InvariantKindRef>,
}

impl Default for InvariantRegistry {
    fn default() -> Self {
        Self { kinds: vec![Arc::new(Lewis), Arc::new(DodonovManko), Arc::new(Gdm), Arc::new(Custom)] }
    }
}

impl InvariantRegistry {
    pub fn register(&mut self, kind: InvariantKindRef) {
        self.kinds.retain(|k| k.name() != kind.name());
        self.kinds.push(kind);
    }

    pub fn get(&self, name: &str) -> Result<InvariantKindRef> {
        self.kinds
            .iter()
            .find(|k| k.name() == name)
            .cloned()
            .ok_or_else(|| Error::UnknownName { kind: "invariant kind", name: name.to_string() })
    }

    /// Looks up `name` and resolves it, rejecting unrecognised parameters.
    pub fn resolve(&self, name: &str, sys: &LsodeSystem, params: &InvariantParams) -> Result<InvariantSpec> {
        let kind = self.get(name)?;
        if let Some(bad) = params.keys().find(|k| !kind.parameters().contains(&k.as_str())) {
            return Err(invalid(format!("invariant kind '{name}' has no parameter '{bad}'")));
        }
        kind.resolve(sys, params)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.kinds.iter().map(|k| k.name()).collect()
    }
}
