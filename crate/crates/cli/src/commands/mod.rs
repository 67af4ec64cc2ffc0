//! Subcommand implementations. Each returns staged files plus a JSON summary;
//! nothing touches the filesystem until the whole command has succeeded.

use std::path::PathBuf;
use std::sync::Arc;

use qaept::arnold::{AeptMap, HarmonicAuxMap, WronskianMap};
use qaept::invariants::InvariantSpec;
use qaept::lsode::{integrate_classical, BasisRef, BasisSource};
use qaept::specfun::SeriesControl;
use qaept::Error;
use serde_json::Value;

use crate::config::{Auxiliary, BasisChoice, RunConfig};
use crate::error::{exit, CliError};
use crate::output::Staged;

pub mod classical;
pub mod eigenstates;
pub mod invariant;
pub mod map;
pub mod propagate;
pub mod verify;

/// Extra time past `t_final` covered by numeric bases, so one-sided
/// differences and interpolation at the end stay inside the span.
pub const SPAN_MARGIN: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Direction {
    Forward,
    Inverse,
}

pub struct Ctx<'a> {
    pub cfg: &'a RunConfig,
    pub threads: usize,
    pub input: Option<PathBuf>,
    pub direction: Direction,
}

pub struct Outcome {
    pub staged: Staged,
    pub summary: Value,
    pub code: u8,
}

impl Outcome {
    pub fn ok(staged: Staged, summary: Value) -> Self {
        Self { staged, summary, code: exit::OK }
    }
}

/// Sample times `a, a + dt, …` ending exactly on `b`.
pub fn sample_times(a: f64, b: f64, dt: f64) -> Vec<f64> {
    let n = (((b - a) / dt) - 1e-9).ceil().max(1.0) as usize;
    (0..=n).map(|k| if k == n { b } else { a + k as f64 * dt }).collect()
}

pub fn numeric_basis(cfg: &RunConfig, t_grid: &[f64]) -> Result<BasisRef, CliError> {
    Ok(Arc::new(integrate_classical(&cfg.system, t_grid)?))
}

/// The configured basis on `[0, t_end]`: the closed form when requested or
/// available (`auto`), otherwise the numeric integrator.
pub fn basis_for(cfg: &RunConfig, choice: BasisChoice, t_end: f64) -> Result<(BasisRef, BasisSource), CliError> {
    let closed = || cfg.system.closed_form(&SeriesControl::default());
    match choice {
        BasisChoice::Closed => match closed() {
            Some(b) => Ok((b?, BasisSource::ClosedForm)),
            None => Err(CliError::config(format!("system '{}' has no closed-form basis", cfg.system_kind))),
        },
        BasisChoice::Auto => match closed() {
            Some(b) => Ok((b?, BasisSource::ClosedForm)),
            None => Ok((numeric_basis(cfg, &sample_times(0.0, t_end, 0.05))?, BasisSource::Numeric)),
        },
        BasisChoice::Numeric => Ok((numeric_basis(cfg, &sample_times(0.0, t_end, 0.05))?, BasisSource::Numeric)),
    }
}

/// Basis covering `[0, t_final]` plus the margin.
pub fn run_basis(cfg: &RunConfig) -> Result<BasisRef, CliError> {
    Ok(basis_for(cfg, BasisChoice::Auto, cfg.time.t_final + SPAN_MARGIN)?.0)
}

pub fn source_name(s: BasisSource) -> &'static str {
    match s {
        BasisSource::Numeric => "numeric",
        BasisSource::ClosedForm => "closed_form",
    }
}

/// The map between the configured system and its auxiliary.
pub fn aux_map(
    cfg: &RunConfig,
    aux: Auxiliary,
    basis: &BasisRef,
    gamma_tilde: f64,
    horizon: (f64, f64),
) -> Result<Box<dyn AeptMap>, CliError> {
    Ok(match aux {
        Auxiliary::Harmonic => Box::new(HarmonicAuxMap::new(basis.clone(), cfg.omega0, gamma_tilde, horizon)?),
        Auxiliary::Engineered => Box::new(WronskianMap::new(&cfg.system)?),
    })
}

/// `(Ω̃, γ̃)` of a discrete-spectrum invariant.
pub fn discrete_params(spec: &InvariantSpec) -> Result<(f64, f64), CliError> {
    spec.big_omega()?;
    let w = spec.omega_tilde().ok_or(Error::ContinuousSpectrum { omega_sq: spec.big_omega_sq })?;
    Ok((w, spec.gamma_tilde))
}

pub fn spec_json(spec: &InvariantSpec) -> Value {
    use qaept::io::json_f64;
    serde_json::json!({
        "label": spec.label,
        "omega_tilde_sq": json_f64(spec.omega_tilde_sq),
        "gamma_tilde": json_f64(spec.gamma_tilde),
        "big_omega_sq": json_f64(spec.big_omega_sq),
        "regime": if spec.big_omega().is_ok() { "discrete" } else { "continuous" },
    })
}
