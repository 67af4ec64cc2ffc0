use std::collections::BTreeMap;

use qaept::invariants::{build_gck_hamiltonian, build_invariant, expectation, position, OperatorMatrix};
use qaept::io::{json_f64, read_wavefunction_binary};
use qaept::lsode::{BasisRef, LsodeSystem};
use qaept::propagator::{fidelity, propagate, trajectory_files, PropagationConfig, Trajectory};
use qaept::quantum::{dm_eigenstate, gaussian_packet, Grid, PhysicalConstants, WaveFunction};
use serde_json::{json, Value};

use super::{discrete_params, run_basis, Ctx, Outcome};
use crate::config::{Format, Initial, RunConfig};
use crate::error::CliError;
use crate::output::Staged;

pub fn initial_state(cfg: &RunConfig, basis: &BasisRef) -> Result<WaveFunction, CliError> {
    match &cfg.propagate.initial {
        Initial::Gaussian { x0, p0, sigma } => Ok(gaussian_packet(&cfg.grid, &cfg.consts, *x0, *p0, *sigma, 0.0)?),
        Initial::Eigenstate { n } => {
            let (w, g) = discrete_params(&cfg.spec)?;
            Ok(dm_eigenstate(basis.clone(), w, g, *n, 0.0, &cfg.grid, &cfg.consts)?)
        }
        Initial::File(p) => {
            let psi = read_wavefunction_binary(p)?;
            if !psi.grid.same_as(&cfg.grid) || psi.consts != cfg.consts {
                return Err(CliError::config(format!("initial state {} does not match the configured grid and constants", p.display())));
            }
            if psi.t > cfg.time.t_final {
                return Err(CliError::config("initial state time lies after 'time.t_final'"));
            }
            Ok(psi)
        }
    }
}

/// `<x>`, `<H>` and `<I>` at every stored snapshot.
pub fn trajectory_expectations(
    traj: &Trajectory,
    sys: &LsodeSystem,
    basis: &BasisRef,
    cfg: &RunConfig,
) -> Result<BTreeMap<String, Vec<f64>>, CliError> {
    let (grid, consts): (&Grid, &PhysicalConstants) = (&cfg.grid, &cfg.consts);
    let x = OperatorMatrix::hermitian(*grid, 0.0, position(grid))?;
    let mut out: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for s in &traj.states {
        let h = build_gck_hamiltonian(sys, grid, consts, s.t)?;
        let i = build_invariant(&cfg.spec, basis.as_ref(), grid, consts, s.t)?;
        out.entry("x".into()).or_default().push(expectation(&x, s)?.re);
        out.entry("H".into()).or_default().push(expectation(&h, s)?.re);
        out.entry("I".into()).or_default().push(expectation(&i, s)?.re);
    }
    Ok(out)
}

pub fn run(ctx: &Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let opts = &cfg.propagate;
    let basis = run_basis(cfg)?;
    let psi0 = initial_state(cfg, &basis)?;
    let pc = PropagationConfig::new(cfg.time.dt, cfg.time.t_final, opts.store_every, opts.boundary_tol)?;
    let traj = propagate(&psi0, &cfg.system, &cfg.grid, &cfg.consts, &pc)?;
    let ex = trajectory_expectations(&traj, &cfg.system, &basis, cfg)?;

    let mut staged = Staged::new();
    for (name, bytes) in trajectory_files(&traj, &cfg.system_kind, cfg.time.dt, &ex) {
        staged.add(name, bytes);
    }
    if cfg.has(Format::Bin) {
        staged.wavefunction("final", traj.last(), &[Format::Bin]);
    }
    let norms = traj.norms();
    let drift = |v: &[f64]| {
        let v0 = v[0];
        v.iter().map(|x| (x - v0).abs()).fold(0.0, f64::max) / v0.abs().max(f64::MIN_POSITIVE)
    };
    let mut summary = json!({
        "command": "propagate",
        "system": cfg.system_kind,
        "steps_stored": traj.states.len(),
        "t_final": json_f64(traj.last().t),
        "norm_drift": json_f64(norms.iter().map(|n| (n - norms[0]).abs()).fold(0.0, f64::max)),
        "invariant_relative_drift": json_f64(drift(&ex["I"])),
    });
    if let Initial::Eigenstate { n } = opts.initial {
        let (w, g) = discrete_params(&cfg.spec)?;
        let exact = dm_eigenstate(basis.clone(), w, g, n, traj.last().t, &cfg.grid, &cfg.consts)?;
        summary["fidelity_vs_analytic"] = json_f64(fidelity(traj.last(), &exact)?);
    }
    summary["files"] = Value::from(staged.names().len());
    Ok(Outcome::ok(staged, summary))
}
