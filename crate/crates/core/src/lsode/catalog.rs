//! Name-keyed registry of system families.
//!
//! Each family is a [`SystemFactory`] that turns string parameters into an
//! [`LsodeSystem`]. The built-in set covers `free`, `harmonic`,
//! `caldirola_kanai`, `hermite`, `lane_emden` and `custom` (tabulated CSV).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};

use super::system::{lane_emden_system, LsodeSystem, Tabulated};

/// String-valued parameters with typed accessors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SystemParams {
    values: BTreeMap<String, String>,
}

impl SystemParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.insert(key, value);
        self
    }

    pub fn insert(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.values.get(key) {
            None => Ok(default),
            Some(s) => s
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| invalid(format!("parameter {key} = {s:?} is not a finite number"))),
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }
}

pub trait SystemFactory: Send + Sync {
    fn name(&self) -> &'static str;
    /// Recognized parameter keys with their defaults, for help text and
    /// config validation.
    fn parameters(&self) -> &'static [(&'static str, &'static str)];
    fn build(&self, params: &SystemParams, mass: f64) -> Result<LsodeSystem>;
}

struct FreeFactory;
struct HarmonicFactory;
struct CkFactory;
struct HermiteFactory;
struct LaneEmdenFactory;
struct CustomFactory;

impl SystemFactory for FreeFactory {
    fn name(&self) -> &'static str {
        "free"
    }
    fn parameters(&self) -> &'static [(&'static str, &'static str)] {
        &[]
    }
    fn build(&self, _p: &SystemParams, mass: f64) -> Result<LsodeSystem> {
        LsodeSystem::new(Arc::new(super::system::Free), mass)
    }
}

impl SystemFactory for HarmonicFactory {
    fn name(&self) -> &'static str {
        "harmonic"
    }
    fn parameters(&self) -> &'static [(&'static str, &'static str)] {
        &[("omega0", "1")]
    }
    fn build(&self, p: &SystemParams, mass: f64) -> Result<LsodeSystem> {
        LsodeSystem::harmonic(p.f64_or("omega0", 1.0)?, mass)
    }
}

impl SystemFactory for CkFactory {
    fn name(&self) -> &'static str {
        "caldirola_kanai"
    }
    fn parameters(&self) -> &'static [(&'static str, &'static str)] {
        &[("gamma", "0.4"), ("omega", "1")]
    }
    fn build(&self, p: &SystemParams, mass: f64) -> Result<LsodeSystem> {
        LsodeSystem::caldirola_kanai(p.f64_or("gamma", 0.4)?, p.f64_or("omega", 1.0)?, mass)
    }
}

impl SystemFactory for HermiteFactory {
    fn name(&self) -> &'static str {
        "hermite"
    }
    fn parameters(&self) -> &'static [(&'static str, &'static str)] {
        &[("alpha", "0.25"), ("omega", "1")]
    }
    fn build(&self, p: &SystemParams, mass: f64) -> Result<LsodeSystem> {
        LsodeSystem::hermite(p.f64_or("alpha", 0.25)?, p.f64_or("omega", 1.0)?, mass)
    }
}

impl SystemFactory for LaneEmdenFactory {
    fn name(&self) -> &'static str {
        "lane_emden"
    }
    fn parameters(&self) -> &'static [(&'static str, &'static str)] {
        &[("mu", "0.3"), ("nu", "0.2"), ("omega0", "1")]
    }
    fn build(&self, p: &SystemParams, mass: f64) -> Result<LsodeSystem> {
        lane_emden_system(p.f64_or("mu", 0.3)?, p.f64_or("nu", 0.2)?, p.f64_or("omega0", 1.0)?, mass)
    }
}

impl SystemFactory for CustomFactory {
    fn name(&self) -> &'static str {
        "custom"
    }
    fn parameters(&self) -> &'static [(&'static str, &'static str)] {
        &[("table", "")]
    }
    fn build(&self, p: &SystemParams, mass: f64) -> Result<LsodeSystem> {
        let path = p.get_str("table").filter(|s| !s.is_empty()).ok_or_else(|| invalid("custom system needs a table path"))?;
        let tab = Tabulated::from_csv(&PathBuf::from(path))?;
        LsodeSystem::new(Arc::new(tab), mass)
    }
}

pub struct SystemRegistry {
    factories: BTreeMap<&'static str, Box<dyn SystemFactory>>,
}

impl Default for SystemRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl SystemRegistry {
    pub fn empty() -> Self {
        Self { factories: BTreeMap::new() }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(FreeFactory));
        r.register(Box::new(HarmonicFactory));
        r.register(Box::new(CkFactory));
        r.register(Box::new(HermiteFactory));
        r.register(Box::new(LaneEmdenFactory));
        r.register(Box::new(CustomFactory));
        r
    }

    /// Adds a family, replacing any previous one of the same name.
    pub fn register(&mut self, factory: Box<dyn SystemFactory>) {
        self.factories.insert(factory.name(), factory);
    }

    pub fn get(&self, name: &str) -> Result<&dyn SystemFactory> {
        self.factories
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::UnknownName { kind: "system", name: name.to_string() })
    }

    pub fn build(&self, name: &str, params: &SystemParams, mass: f64) -> Result<LsodeSystem> {
        let factory = self.get(name)?;
        let known = factory.parameters();
        if let Some(bad) = params.keys().find(|k| !known.iter().any(|(n, _)| n == k)) {
            return Err(invalid(format!("system {name} has no parameter {bad}")));
        }
        factory.build(params, mass)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.factories.keys().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_registered() {
        let r = SystemRegistry::with_builtins();
        assert_eq!(r.names(), vec!["caldirola_kanai", "custom", "free", "harmonic", "hermite", "lane_emden"]);
        let ck = r.build("caldirola_kanai", &SystemParams::new().with("gamma", 0.2), 2.0).unwrap();
        assert_eq!(ck.fdot(3.0), 0.2);
        assert_eq!(ck.mass(), 2.0);
    }

    #[test]
    fn unknown_names_and_keys_are_rejected() {
        let r = SystemRegistry::with_builtins();
        assert!(matches!(r.build("morse", &SystemParams::new(), 1.0), Err(Error::UnknownName { .. })));
        assert!(r.build("harmonic", &SystemParams::new().with("gamma", 1), 1.0).is_err());
        assert!(r.build("harmonic", &SystemParams::new().with("omega0", "abc"), 1.0).is_err());
        assert!(r.build("custom", &SystemParams::new(), 1.0).is_err());
    }

    #[test]
    fn custom_table_roundtrip() {
        let dir = std::env::temp_dir().join(format!("qaept-cat-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("coeffs.csv");
        std::fs::write(&path, "t,fdot,omega_sq,lambda\n0,0.4,1,0\n5,0.4,1,0\n10,0.4,1,0\n").unwrap();
        let r = SystemRegistry::with_builtins();
        let sys = r.build("custom", &SystemParams::new().with("table", path.display()), 1.0).unwrap();
        assert!((sys.f(2.0) - 0.8).abs() < 1e-15);
        assert!(!sys.is_forced());
        std::fs::remove_dir_all(&dir).ok();
    }
}
