//! Direct Crank--Nicolson integration of the GCK Schrödinger equation.
//!
//! This is the reference the analytic constructions are checked against.
//! It reads only the system coefficients and never a classical basis.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::invariants::{gck_form, BandMatrix};
use crate::io::{json_f64, to_json_string, wavefunction_csv};
use crate::lsode::LsodeSystem;
use crate::quantum::{Grid, PhysicalConstants, WaveFunction};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationConfig {
    pub dt: f64,
    /// Absolute end time.
    pub t_final: f64,
    pub store_every: usize,
    pub boundary_tol: f64,
}

impl PropagationConfig {
    pub fn new(dt: f64, t_final: f64, store_every: usize, boundary_tol: f64) -> Result<Self> {
        let cfg = Self { dt, t_final, store_every, boundary_tol };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if self.store_every < 1 {
            return Err(invalid("store_every must be at least 1"));
        }
        if !(self.boundary_tol > 0.0) || !self.t_final.is_finite() {
            return Err(invalid("boundary_tol must be positive and t_final finite"));
        }
        Ok(())
    }
}

fn hamiltonian(sys: &LsodeSystem, grid: &Grid, consts: &PhysicalConstants, t: f64) -> Result<BandMatrix> {
    Ok(gck_form(sys, consts, t)?.assemble(grid, consts))
}

/// `(1 + iH dt/2ħ)^{-1} (1 - iH dt/2ħ) psi` with `H` taken at `t + dt/2`.
pub fn crank_nicolson_step(
    psi: &WaveFunction,
    sys: &LsodeSystem,
    grid: &Grid,
    consts: &PhysicalConstants,
    t: f64,
    dt: f64,
) -> Result<WaveFunction> {
    if !psi.grid.same_as(grid) {
        return Err(Error::GridMismatch);
    }
    if !(dt > 0.0) {
        return Err(invalid(format!("dt must be positive, got {dt}")));
    }
    let h = hamiltonian(sys, grid, consts, t + 0.5 * dt)?;
    let id = BandMatrix::identity(grid.len());
    let c = Complex64::new(0.0, 0.5 * dt / consts.hbar);
    let rhs = id.add_scaled(&h, -c).apply(&psi.samples);
    let next = id.add_scaled(&h, c).solve(&rhs)?;
    WaveFunction::new(*grid, next, t + dt, *consts)
}

/// Stored snapshots of one propagation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<WaveFunction>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }
    pub fn norms(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.norm()).collect()
    }
    pub fn last(&self) -> &WaveFunction {
        self.states.last().expect("trajectory holds the initial state")
    }
}

/// Observer called after every step with the step index and the new state.
pub type StepObserver<'a> = dyn FnMut(usize, &WaveFunction) -> Result<()> + 'a;

/// Propagates from `psi0.t` to `cfg.t_final`; the last step is shortened to land on it.
pub fn propagate(
    psi0: &WaveFunction,
    sys: &LsodeSystem,
    grid: &Grid,
    consts: &PhysicalConstants,
    cfg: &PropagationConfig,
) -> Result<Trajectory> {
    propagate_observed(psi0, sys, grid, consts, cfg, &mut |_, _| Ok(()))
}

pub fn propagate_observed(
    psi0: &WaveFunction,
    sys: &LsodeSystem,
    grid: &Grid,
    consts: &PhysicalConstants,
    cfg: &PropagationConfig,
    observe: &mut StepObserver<'_>,
) -> Result<Trajectory> {
    cfg.validate()?;
    let t0 = psi0.t;
    if cfg.t_final < t0 {
        return Err(invalid(format!("t_final {} precedes the initial time {t0}", cfg.t_final)));
    }
    let leak = |psi: &WaveFunction| {
        let a = psi.boundary_amplitude();
        if a > cfg.boundary_tol {
            Err(Error::BoundaryLeak { t: psi.t, amplitude: a })
        } else {
            Ok(())
        }
    };
    leak(psi0)?;
    let span = cfg.t_final - t0;
    let steps = ((span / cfg.dt) - 1e-9).ceil().max(0.0) as usize;
    let mut states = vec![psi0.clone()];
    let mut psi = psi0.clone();
    for k in 0..steps {
        let t = t0 + k as f64 * cfg.dt;
        let t_next = if k + 1 == steps { cfg.t_final } else { t0 + (k + 1) as f64 * cfg.dt };
        psi = crank_nicolson_step(&psi, sys, grid, consts, t, t_next - t)?.with_time(t_next);
        leak(&psi)?;
        observe(k + 1, &psi)?;
        if (k + 1) % cfg.store_every == 0 || k + 1 == steps {
            states.push(psi.clone());
        }
    }
    Ok(Trajectory { states })
}

/// `|<a|b>|` of the renormalized states.
pub fn fidelity(a: &WaveFunction, b: &WaveFunction) -> Result<f64> {
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(invalid("fidelity of a zero state"));
    }
    Ok((a.inner(b)?.norm() / (na * nb)).min(1.0))
}

/// Closed-form free evolution of the Gaussian packet centred at `x0` with
/// momentum `p0` and width `sigma` at time zero.
pub fn free_gaussian(
    grid: &Grid,
    consts: &PhysicalConstants,
    x0: f64,
    p0: f64,
    sigma: f64,
    t: f64,
) -> Result<WaveFunction> {
    if !(sigma > 0.0) {
        return Err(invalid(format!("packet width must be positive, got {sigma}")));
    }
    let (hbar, m) = (consts.hbar, consts.m);
    let k0 = p0 / hbar;
    let v = p0 / m;
    let s = Complex64::new(1.0, hbar * t / (2.0 * m * sigma * sigma));
    let amp = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25) / s.sqrt();
    let samples = grid
        .points()
        .iter()
        .map(|&x| {
            let d = x - x0 - v * t;
            let arg = -d * d / (4.0 * sigma * sigma * s)
                + Complex64::new(0.0, k0 * (x - x0) - hbar * k0 * k0 * t / (2.0 * m));
            amp * arg.exp()
        })
        .collect();
    WaveFunction::new(*grid, samples, t, *consts)
}

/// Snapshot CSV files plus `manifest.json`, as `(file name, contents)` pairs.
pub fn trajectory_files(
    traj: &Trajectory,
    system: &str,
    dt: f64,
    expectations: &BTreeMap<String, Vec<f64>>,
) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = traj
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (format!("snapshot_{i:05}.csv"), wavefunction_csv(s).into_bytes()))
        .collect();
    let g = traj.last().grid;
    let ex: serde_json::Map<String, Value> = expectations
        .iter()
        .map(|(k, v)| (k.clone(), Value::Array(v.iter().map(|&x| json_f64(x)).collect())))
        .collect();
    let manifest = json!({
        "system": system,
        "grid": {"x_min": json_f64(g.x_min()), "x_max": json_f64(g.x_max()), "n": g.len()},
        "dt": json_f64(dt),
        "times": traj.times().into_iter().map(json_f64).collect::<Vec<_>>(),
        "norms": traj.norms().into_iter().map(json_f64).collect::<Vec<_>>(),
        "expectations": ex,
        "snapshots": files.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
    });
    files.push(("manifest.json".to_string(), to_json_string(&manifest).into_bytes()));
    files
}

/// Writes [`trajectory_files`] into `dir`.
pub fn export_trajectory(
    traj: &Trajectory,
    system: &str,
    dt: f64,
    expectations: &BTreeMap<String, Vec<f64>>,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    for (name, bytes) in trajectory_files(traj, system, dt, expectations) {
        let p = dir.join(name);
        fs::write(&p, bytes)?;
        out.push(p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{gaussian_packet, ho_eigenstate};

    #[test]
    fn stationary_state_picks_up_phase() {
        let c = PhysicalConstants::default();
        let g = Grid::symmetric(10.0, 512).unwrap();
        let sys = LsodeSystem::harmonic(1.0, 1.0).unwrap();
        let psi = ho_eigenstate(0, 1.0, 0.0, &g, &c).unwrap();
        let dt = 1e-2;
        let next = crank_nicolson_step(&psi, &sys, &g, &c, 0.0, dt).unwrap();
        let overlap = psi.inner(&next).unwrap();
        assert!((overlap.norm() - 1.0).abs() < 1e-9);
        assert!((overlap.arg() + 0.5 * dt).abs() < 1e-6, "{}", overlap.arg());
        assert!((next.norm() - psi.norm()).abs() < 1e-12);
    }

    #[test]
    fn zero_state_stays_zero() {
        let c = PhysicalConstants::default();
        let g = Grid::symmetric(5.0, 64).unwrap();
        let z = WaveFunction::zeros(g, 0.0, c);
        let cfg = PropagationConfig::new(0.1, 1.0, 3, 1e-6).unwrap();
        let tr = propagate(&z, &LsodeSystem::free(1.0), &g, &c, &cfg).unwrap();
        assert!(tr.states.iter().all(|s| s.samples.iter().all(|v| *v == Complex64::new(0.0, 0.0))));
        assert_eq!(tr.times(), vec![0.0, 0.30000000000000004, 0.6000000000000001, 0.9, 1.0]);
    }

    #[test]
    fn leak_is_detected() {
        let c = PhysicalConstants::default();
        let g = Grid::symmetric(5.0, 128).unwrap();
        let psi = gaussian_packet(&g, &c, 0.0, 4.0, 0.5, 0.0).unwrap();
        let cfg = PropagationConfig::new(1e-2, 3.0, 1, 1e-6).unwrap();
        let r = propagate(&psi, &LsodeSystem::free(1.0), &g, &c, &cfg);
        assert!(matches!(r, Err(Error::BoundaryLeak { .. })));
    }

    #[test]
    fn trajectory_export_layout() {
        let c = PhysicalConstants::default();
        let g = Grid::symmetric(8.0, 64).unwrap();
        let psi = gaussian_packet(&g, &c, 0.0, 0.0, 1.0, 0.0).unwrap();
        let tr = propagate(&psi, &LsodeSystem::free(1.0), &g, &c, &PropagationConfig::new(0.1, 0.3, 2, 1e-3).unwrap()).unwrap();
        let ex: BTreeMap<String, Vec<f64>> = [("x".to_string(), vec![0.0; 3])].into();
        let dir = std::env::temp_dir().join(format!("traj_export_{}", std::process::id()));
        let files = export_trajectory(&tr, "free", 0.1, &ex, &dir).unwrap();
        assert_eq!(files.len(), 4);
        let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["snapshots"].as_array().unwrap().len(), 3);
        assert_eq!(manifest["grid"]["n"], 64);
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn config_validation() {
        assert!(PropagationConfig::new(0.0, 1.0, 1, 1e-6).is_err());
        assert!(PropagationConfig::new(0.1, 1.0, 0, 1e-6).is_err());
    }

    #[test]
    fn oracle_matches_packet_at_origin() {
        let c = PhysicalConstants::new(0.8, 1.7).unwrap();
        let g = Grid::symmetric(10.0, 256).unwrap();
        let a = free_gaussian(&g, &c, 0.5, 0.3, 1.0, 0.0).unwrap();
        let b = gaussian_packet(&g, &c, 0.5, 0.3, 1.0, 0.0).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
    }
}
