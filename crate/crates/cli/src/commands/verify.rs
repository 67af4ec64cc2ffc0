//! The property suite: every check records its measured value against a
//! tolerance. A check that errors counts as failed; checks that do not apply
//! to the configured system (such as eigenstate fidelity for a continuous
//! spectrum) are skipped.

use qaept::arnold::{AeptMap, HarmonicAuxMap, WronskianMap};
use qaept::invariants::{build_invariant, expectation, invariance_residual};
use qaept::io::json_f64;
use qaept::lsode::{integrate_classical, BasisRef, ClassicalBasis};
use qaept::propagator::{fidelity, propagate, PropagationConfig};
use qaept::quantum::{dm_eigenstate, gaussian_packet, qaept_apply, qaept_inverse};
use qaept::specfun::SeriesControl;
use serde_json::{json, Value};

use super::{run_basis, sample_times, spec_json, Ctx, Outcome, SPAN_MARGIN};
use crate::config::RunConfig;
use crate::error::{exit, CliError};
use crate::output::Staged;
use crate::parallel::par_map;

pub const WRONSKIAN_TOL: f64 = 1e-8;
pub const CLOSED_FORM_TOL: f64 = 1e-6;
pub const ERMAKOV_TOL: f64 = 1e-6;
pub const UNITARITY_TOL: f64 = 1e-9;
pub const NORM_DRIFT_TOL: f64 = 1e-9;
pub const INVARIANT_DRIFT_TOL: f64 = 1e-4;

/// Test packet `(x0, p0, sigma)` used by the map and drift checks.
const PACKET: (f64, f64, f64) = (0.5, 0.3, 0.7);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cmp {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub value: Option<f64>,
    pub tolerance: f64,
    cmp: Cmp,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Check {
    fn measured(name: &'static str, measured: Result<f64, CliError>, tolerance: f64, cmp: Cmp) -> Self {
        match measured {
            Ok(v) => {
                let ok = match cmp {
                    Cmp::AtMost => v <= tolerance,
                    Cmp::AtLeast => v >= tolerance,
                };
                let status = if ok { Status::Pass } else { Status::Fail };
                Self { name, value: Some(v), tolerance, cmp, status, detail: String::new() }
            }
            Err(e) => Self { name, value: None, tolerance, cmp, status: Status::Fail, detail: e.to_string() },
        }
    }

    fn skipped(name: &'static str, tolerance: f64, cmp: Cmp, why: impl Into<String>) -> Self {
        Self { name, value: None, tolerance, cmp, status: Status::Skipped, detail: why.into() }
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "status": match self.status { Status::Pass => "pass", Status::Fail => "fail", Status::Skipped => "skipped" },
            "value": self.value.map_or(Value::Null, json_f64),
            "tolerance": json_f64(self.tolerance),
            "comparison": match self.cmp { Cmp::AtMost => "<=", Cmp::AtLeast => ">=" },
            "detail": self.detail,
        })
    }
}

fn max_over<F: Fn(f64) -> Result<f64, CliError>>(times: &[f64], f: F) -> Result<f64, CliError> {
    times.iter().try_fold(0.0_f64, |m, &t| Ok(m.max(f(t)?.abs())))
}

fn closed_form_error(cfg: &RunConfig, numeric: &dyn ClassicalBasis) -> Option<Result<f64, CliError>> {
    let closed = cfg.system.closed_form(&SeriesControl::default())?;
    Some((|| {
        let closed = closed?;
        max_over(&sample_times(0.0, cfg.time.t_final, 0.01), |t| {
            let (a, b) = (numeric.eval(t)?, closed.eval(t)?);
            Ok([a.u1 - b.u1, a.u1_dot - b.u1_dot, a.u2 - b.u2, a.u2_dot - b.u2_dot, a.up - b.up, a.up_dot - b.up_dot]
                .iter()
                .fold(0.0_f64, |m, d| m.max(d.abs())))
        })
    })())
}

fn map_checks(cfg: &RunConfig, basis: &BasisRef) -> Result<(f64, f64), CliError> {
    let t = cfg.time.t_final.min(1.0);
    let map = HarmonicAuxMap::new(basis.clone(), cfg.omega0, 0.0, (0.0, cfg.time.t_final))?;
    let (x0, p0, sigma) = PACKET;
    let psi = gaussian_packet(&cfg.grid, &cfg.consts, x0, p0, sigma, t)?;
    let phi = qaept_apply(&psi, &map)?;
    let back = qaept_inverse(&phi, &map)?;
    Ok(((phi.norm() - psi.norm()).abs(), back.max_abs_diff(&psi)?))
}

/// Minimum fidelity of propagated vs analytic eigenstates `0..=n_max`.
fn oracle_fidelity(ctx: &Ctx, basis: &BasisRef, wt: f64, gt: f64) -> Result<f64, CliError> {
    let cfg = ctx.cfg;
    let pc = PropagationConfig::new(cfg.time.dt, cfg.time.t_final, usize::MAX, cfg.propagate.boundary_tol)?;
    let ns: Vec<usize> = (0..=cfg.verify.n_max).collect();
    par_map(&ns, ctx.threads, |&n| -> Result<f64, CliError> {
        let psi0 = dm_eigenstate(basis.clone(), wt, gt, n, 0.0, &cfg.grid, &cfg.consts)?;
        let traj = propagate(&psi0, &cfg.system, &cfg.grid, &cfg.consts, &pc)?;
        let exact = dm_eigenstate(basis.clone(), wt, gt, n, cfg.time.t_final, &cfg.grid, &cfg.consts)?;
        Ok(fidelity(traj.last(), &exact)?)
    })
    .into_iter()
    .try_fold(1.0_f64, |m, f| Ok(m.min(f?)))
}

/// `(norm drift, relative drift of <I>)` for the test packet.
fn packet_drift(cfg: &RunConfig, basis: &BasisRef) -> Result<(f64, f64), CliError> {
    let (x0, p0, sigma) = PACKET;
    let psi0 = gaussian_packet(&cfg.grid, &cfg.consts, x0, p0, sigma, 0.0)?;
    let pc = PropagationConfig::new(cfg.time.dt, cfg.time.t_final, cfg.propagate.store_every, cfg.propagate.boundary_tol)?;
    let traj = propagate(&psi0, &cfg.system, &cfg.grid, &cfg.consts, &pc)?;
    let i_of = |s: &qaept::quantum::WaveFunction| -> Result<f64, CliError> {
        let op = build_invariant(&cfg.spec, basis.as_ref(), &cfg.grid, &cfg.consts, s.t)?;
        Ok(expectation(&op, s)?.re)
    };
    let i0 = i_of(&traj.states[0])?;
    let mut drift: f64 = 0.0;
    for s in &traj.states[1..] {
        drift = drift.max((i_of(s)? - i0).abs() / i0.abs());
    }
    let n0 = traj.states[0].norm();
    let norm = traj.norms().iter().map(|n| (n - n0).abs()).fold(0.0, f64::max);
    Ok((norm, drift))
}

pub fn checks(ctx: &Ctx) -> Result<Vec<Check>, CliError> {
    use Cmp::*;
    let cfg = ctx.cfg;
    let t_end = cfg.time.t_final + SPAN_MARGIN;
    let mut out = Vec::new();

    let numeric = integrate_classical(&cfg.system, &sample_times(0.0, t_end, 0.05));
    out.push(Check::measured(
        "wronskian",
        numeric.as_ref().map(|b| b.max_wronskian_error()).map_err(|e| e.clone().into()),
        WRONSKIAN_TOL,
        AtMost,
    ));
    out.push(match &numeric {
        Ok(nb) => match closed_form_error(cfg, nb) {
            Some(r) => Check::measured("closed_form_agreement", r, CLOSED_FORM_TOL, AtMost),
            None => Check::skipped("closed_form_agreement", CLOSED_FORM_TOL, AtMost, "no closed-form basis"),
        },
        Err(e) => Check::measured("closed_form_agreement", Err(e.clone().into()), CLOSED_FORM_TOL, AtMost),
    });

    let basis = run_basis(cfg)?;
    let samples = sample_times(0.0, cfg.time.t_final, 0.05);
    out.push(Check::measured(
        "ermakov_harmonic",
        HarmonicAuxMap::new(basis.clone(), cfg.omega0, 0.0, (0.0, t_end))
            .map_err(CliError::from)
            .and_then(|m| max_over(&samples, |t| Ok(m.ermakov_residual(t)?))),
        ERMAKOV_TOL,
        AtMost,
    ));
    out.push(Check::measured(
        "ermakov_engineered",
        WronskianMap::new(&cfg.system)
            .map_err(CliError::from)
            .and_then(|m| max_over(&samples, |t| Ok(m.ermakov_residual(t)?))),
        ERMAKOV_TOL,
        AtMost,
    ));

    let maps = map_checks(cfg, &basis);
    out.push(Check::measured("map_norm_preservation", maps.as_ref().map(|m| m.0).map_err(clone_err), UNITARITY_TOL, AtMost));
    out.push(Check::measured("map_round_trip", maps.map(|m| m.1), UNITARITY_TOL, AtMost));

    let res_times = [0.0, 0.5 * cfg.time.t_final, cfg.time.t_final];
    out.push(Check::measured(
        "invariance_residual",
        max_over(&res_times, |t| {
            Ok(invariance_residual(&cfg.spec, basis.as_ref(), &cfg.system, &cfg.grid, &cfg.consts, t, cfg.invariant.fd_dt)?)
        }),
        cfg.verify.invariance_tol,
        AtMost,
    ));

    let fid_tol = 1.0 - cfg.verify.fidelity_tol;
    out.push(match super::discrete_params(&cfg.spec) {
        Ok((wt, gt)) => Check::measured("eigenstate_fidelity", oracle_fidelity(ctx, &basis, wt, gt), fid_tol, AtLeast),
        Err(e) => Check::skipped("eigenstate_fidelity", fid_tol, AtLeast, format!("no discrete eigenstates: {e}")),
    });

    let drift = packet_drift(cfg, &basis);
    out.push(Check::measured("norm_drift", drift.as_ref().map(|d| d.0).map_err(clone_err), NORM_DRIFT_TOL, AtMost));
    out.push(Check::measured("invariant_drift", drift.map(|d| d.1), INVARIANT_DRIFT_TOL, AtMost));
    Ok(out)
}

fn clone_err(e: &CliError) -> CliError {
    match e {
        CliError::Core(c) => CliError::Core(c.clone()),
        other => CliError::config(other.to_string()),
    }
}

pub fn run(ctx: &Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let checks = checks(ctx)?;
    let passed = checks.iter().all(|c| c.status != Status::Fail);
    let report = json!({
        "system": cfg.system_kind,
        "invariant": spec_json(&cfg.spec),
        "grid": {"x_min": json_f64(cfg.grid.x_min()), "x_max": json_f64(cfg.grid.x_max()), "n": cfg.grid.len()},
        "passed": passed,
        "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
    });
    let mut staged = Staged::new();
    staged.json("report.json", &report);
    Ok(Outcome { staged, summary: report, code: if passed { exit::OK } else { exit::PROPERTY_FAILURE } })
}
