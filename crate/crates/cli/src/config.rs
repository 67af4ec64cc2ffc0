//! Flat `section.key = value` configuration files.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use qaept::invariants::{InvariantParams, InvariantRegistry, InvariantSpec};
use qaept::lsode::catalog::{SystemParams, SystemRegistry};
use qaept::lsode::LsodeSystem;
use qaept::quantum::{Grid, PhysicalConstants};

use crate::error::CliError;

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// Parsed key-value pairs that remember which keys were read.
#[derive(Debug, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, Entry>,
    used: RefCell<BTreeSet<String>>,
}

fn valid_key(k: &str) -> bool {
    !k.is_empty()
        && k.split('.').all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("line {line}: expected `key = value`")))?;
            let (k, v) = (k.trim(), v.trim());
            if !valid_key(k) {
                return Err(CliError::config(format!("line {line}: malformed key '{k}'")));
            }
            if v.is_empty() {
                return Err(CliError::config(format!("line {line}: key '{k}' has no value")));
            }
            if let Some(prev) = entries.insert(k.to_string(), Entry { value: v.to_string(), line }) {
                return Err(CliError::config(format!("line {line}: '{k}' already set on line {}", prev.line)));
            }
        }
        Ok(Self { entries, used: RefCell::default() })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn raw(&self, key: &str) -> Option<&Entry> {
        let e = self.entries.get(key);
        if e.is_some() {
            self.used.borrow_mut().insert(key.to_string());
        }
        e
    }

    pub fn str_opt(&self, key: &str) -> Option<String> {
        self.raw(key).map(|e| e.value.clone())
    }

    pub fn str_or(&self, key: &str, default: &str) -> String {
        self.str_opt(key).unwrap_or_else(|| default.to_string())
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.raw(key)
            .map(|e| {
                e.value.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                    CliError::config(format!("line {}: '{key}' needs a finite number, got '{}'", e.line, e.value))
                })
            })
            .transpose()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(e) => e.value.parse::<usize>().map_err(|_| {
                CliError::config(format!("line {}: '{key}' needs a nonnegative integer, got '{}'", e.line, e.value))
            }),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(e) => match e.value.as_str() {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                other => Err(CliError::config(format!("line {}: '{key}' needs true or false, got '{other}'", e.line))),
            },
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.raw(key)
            .map(|e| {
                e.value
                    .split(',')
                    .map(|s| {
                        s.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                            CliError::config(format!("line {}: '{key}' needs a list of numbers, got '{}'", e.line, e.value))
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    /// Keys below `prefix.` (prefix stripped), marked as read.
    pub fn section(&self, prefix: &str) -> BTreeMap<String, String> {
        let p = format!("{prefix}.");
        let found: BTreeMap<String, String> = self
            .entries
            .iter()
            .filter_map(|(k, e)| k.strip_prefix(&p).map(|s| (s.to_string(), e.value.clone())))
            .collect();
        self.used.borrow_mut().extend(found.keys().map(|k| format!("{p}{k}")));
        found
    }

    pub fn unused(&self) -> Vec<String> {
        let used = self.used.borrow();
        self.entries.keys().filter(|k| !used.contains(*k)).cloned().collect()
    }

    pub fn line_of(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|e| e.line)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Json,
    Bin,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "bin" => Ok(Self::Bin),
            other => Err(CliError::config(format!("unknown output format '{other}' (csv, json, bin)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisChoice {
    Auto,
    Numeric,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Auxiliary {
    Harmonic,
    Engineered,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Initial {
    Gaussian { x0: f64, p0: f64, sigma: f64 },
    Eigenstate { n: usize },
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct TimeConfig {
    pub t_final: f64,
    pub dt: f64,
}

#[derive(Debug, Clone)]
pub struct ClassicalOpts {
    pub basis: BasisChoice,
    pub b: Auxiliary,
    pub t_min: f64,
}

#[derive(Debug, Clone)]
pub struct EigenOpts {
    pub n_max: usize,
    pub times: Vec<f64>,
    pub grid_spectrum: bool,
}

#[derive(Debug, Clone)]
pub struct MapOpts {
    pub auxiliary: Auxiliary,
    pub gamma_tilde: f64,
    pub interpolator: String,
    pub leakage_tol: f64,
}

#[derive(Debug, Clone)]
pub struct InvariantOpts {
    pub times: Vec<f64>,
    pub n_eigen: usize,
    pub fd_dt: f64,
    pub eigensolve: bool,
}

#[derive(Debug, Clone)]
pub struct PropagateOpts {
    pub store_every: usize,
    pub boundary_tol: f64,
    pub initial: Initial,
}

#[derive(Debug, Clone)]
pub struct VerifyOpts {
    pub n_max: usize,
    pub fidelity_tol: f64,
    pub invariance_tol: f64,
}

/// Fully validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub system_kind: String,
    pub system: LsodeSystem,
    pub grid: Grid,
    pub consts: PhysicalConstants,
    pub time: TimeConfig,
    pub spec: InvariantSpec,
    /// Auxiliary harmonic frequency for `b` and the maps.
    pub omega0: f64,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
    pub classical: ClassicalOpts,
    pub eigen: EigenOpts,
    pub map: MapOpts,
    pub invariant: InvariantOpts,
    pub propagate: PropagateOpts,
    pub verify: VerifyOpts,
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::config(format!("'{name}' must be positive, got {v}")))
    }
}

fn auxiliary(s: &str, key: &str) -> Result<Auxiliary, CliError> {
    match s {
        "harmonic" => Ok(Auxiliary::Harmonic),
        "engineered" => Ok(Auxiliary::Engineered),
        other => Err(CliError::config(format!("'{key}' must be harmonic or engineered, got '{other}'"))),
    }
}

impl RunConfig {
    pub fn from_raw(raw: &RawConfig, base: &Path) -> Result<Self, CliError> {
        let system_kind = raw.str_opt("system.kind").ok_or_else(|| CliError::config("missing 'system.kind'"))?;
        let mut params = SystemParams::new();
        for (k, v) in raw.section("system") {
            if k == "kind" {
                continue;
            }
            let v = if k == "table" && Path::new(&v).is_relative() { base.join(&v).display().to_string() } else { v };
            params.insert(&k, v);
        }

        let consts = PhysicalConstants::new(raw.f64_or("constants.hbar", 1.0)?, raw.f64_or("constants.m", 1.0)?)?;
        let system = SystemRegistry::with_builtins().build(&system_kind, &params, consts.m)?;

        let grid = Grid::new(
            raw.f64_or("grid.x_min", -12.0)?,
            raw.f64_or("grid.x_max", 12.0)?,
            raw.usize_or("grid.n", 512)?,
        )?;

        let t0 = raw.f64_or("time.t0", 0.0)?;
        if t0 != 0.0 {
            return Err(CliError::config(format!("'time.t0' must be 0 (the canonical initial time), got {t0}")));
        }
        let time = TimeConfig {
            t_final: positive("time.t_final", raw.f64_or("time.t_final", 5.0)?)?,
            dt: positive("time.dt", raw.f64_or("time.dt", 1e-3)?)?,
        };

        let invariant_kind = raw.str_or("invariant.kind", "gdm");
        let mut inv_params = InvariantParams::new();
        for (k, v) in raw.section("invariant") {
            if k == "kind" {
                continue;
            }
            let x = v.parse::<f64>().map_err(|_| {
                CliError::config(format!("'invariant.{k}' needs a number, got '{v}'"))
            })?;
            inv_params.insert(k, x);
        }
        let spec = InvariantRegistry::default().resolve(&invariant_kind, &system, &inv_params)?;

        let natural = system.omega_sq(0.0);
        let omega0 = positive(
            "aux.omega0",
            raw.f64_or("aux.omega0", if natural > 0.0 { natural.sqrt() } else { 1.0 })?,
        )?;

        let formats = {
            let s = raw.str_or("outputs.formats", "csv");
            let mut f: Vec<Format> = s.split(',').map(Format::parse).collect::<Result<_, _>>()?;
            f.sort();
            f.dedup();
            f
        };
        let out_dir = PathBuf::from(raw.str_or("outputs.dir", "out"));

        let classical = ClassicalOpts {
            basis: match raw.str_or("classical.basis", "auto").as_str() {
                "auto" => BasisChoice::Auto,
                "numeric" => BasisChoice::Numeric,
                "closed" => BasisChoice::Closed,
                other => return Err(CliError::config(format!("'classical.basis' must be auto, numeric or closed, got '{other}'"))),
            },
            b: auxiliary(&raw.str_or("classical.b", "harmonic"), "classical.b")?,
            t_min: raw.f64_or("classical.t_min", 0.0)?,
        };
        if classical.t_min >= time.t_final {
            return Err(CliError::config("'classical.t_min' must lie below 'time.t_final'"));
        }
        if classical.t_min < 0.0 && classical.basis == BasisChoice::Numeric {
            return Err(CliError::config("numeric bases start at t = 0; 'classical.t_min' must be >= 0"));
        }

        let eigen = EigenOpts {
            n_max: raw.usize_or("eigenstates.n_max", 4)?,
            times: raw.f64_list("eigenstates.times")?.unwrap_or_else(|| vec![0.0, time.t_final]),
            grid_spectrum: raw.bool_or("eigenstates.grid_spectrum", true)?,
        };
        let map = MapOpts {
            auxiliary: auxiliary(&raw.str_or("map.auxiliary", "harmonic"), "map.auxiliary")?,
            gamma_tilde: raw.f64_or("map.gamma_tilde", 0.0)?,
            interpolator: raw.str_or("map.interpolator", "sinc"),
            leakage_tol: positive("map.leakage_tol", raw.f64_or("map.leakage_tol", 1e-8)?)?,
        };
        qaept::quantum::InterpolatorRegistry::default().get(&map.interpolator)?;
        let invariant = InvariantOpts {
            times: raw.f64_list("invariant_run.times")?.unwrap_or_else(|| vec![0.0, 0.5 * time.t_final, time.t_final]),
            n_eigen: raw.usize_or("invariant_run.n_eigen", 5)?,
            fd_dt: positive("invariant_run.fd_dt", raw.f64_or("invariant_run.fd_dt", 1e-4)?)?,
            eigensolve: raw.bool_or("invariant_run.eigensolve", true)?,
        };
        let initial = match raw.str_or("initial.kind", "gaussian").as_str() {
            "gaussian" => Initial::Gaussian {
                x0: raw.f64_or("initial.x0", 1.0)?,
                p0: raw.f64_or("initial.p0", 0.0)?,
                sigma: positive("initial.sigma", raw.f64_or("initial.sigma", 1.0)?)?,
            },
            "eigenstate" => Initial::Eigenstate { n: raw.usize_or("initial.n", 0)? },
            "file" => Initial::File(base.join(
                raw.str_opt("initial.path").ok_or_else(|| CliError::config("'initial.kind = file' needs 'initial.path'"))?,
            )),
            other => return Err(CliError::config(format!("'initial.kind' must be gaussian, eigenstate or file, got '{other}'"))),
        };
        let propagate = PropagateOpts {
            store_every: raw.usize_or("propagate.store_every", 100)?,
            boundary_tol: positive("propagate.boundary_tol", raw.f64_or("propagate.boundary_tol", 1e-6)?)?,
            initial,
        };
        if propagate.store_every == 0 {
            return Err(CliError::config("'propagate.store_every' must be at least 1"));
        }
        let verify = VerifyOpts {
            n_max: raw.usize_or("verify.n_max", 2)?,
            fidelity_tol: positive("verify.fidelity_tol", raw.f64_or("verify.fidelity_tol", 1e-4)?)?,
            invariance_tol: positive("verify.invariance_tol", raw.f64_or("verify.invariance_tol", 1e-4)?)?,
        };
        for list in [&eigen.times, &invariant.times] {
            if let Some(t) = list.iter().find(|&&t| t < 0.0 || t > time.t_final) {
                return Err(CliError::config(format!("sample time {t} lies outside [0, t_final]")));
            }
        }

        let unused = raw.unused();
        if let Some(k) = unused.first() {
            return Err(CliError::config(format!(
                "line {}: unknown key '{k}'",
                raw.line_of(k).unwrap_or(0)
            )));
        }
        Ok(Self {
            system_kind,
            system,
            grid,
            consts,
            time,
            spec,
            omega0,
            out_dir,
            formats,
            classical,
            eigen,
            map,
            invariant,
            propagate,
            verify,
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let raw = RawConfig::load(path)?;
        Self::from_raw(&raw, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn has(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}
