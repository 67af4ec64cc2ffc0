use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::io::json_f64;
use crate::lsode::{ClassicalBasis, LsodeSystem};
use crate::quantum::{Grid, PhysicalConstants, WaveFunction};
use crate::specfun::hermite_function;

use super::assembly::build_invariant;
use super::band::BandMatrix;
use super::operators::{build_gck_hamiltonian, OperatorMatrix};
use super::spec::InvariantSpec;

/// Rows at each edge left out of residual norms (widest product stencil).
pub const EDGE_ROWS: usize = 4;

/// Smooth test states: the first four Hermite functions centred on the grid.
pub fn probe_states(grid: &Grid, consts: &PhysicalConstants) -> Vec<Vec<Complex64>> {
    let centre = 0.5 * (grid.x_min() + grid.x_max());
    let len = (consts.hbar / consts.m).sqrt().min((grid.x_max() - grid.x_min()) / 20.0);
    (0..4)
        .map(|n| {
            grid.points()
                .iter()
                .map(|&x| Complex64::from(hermite_function(n, (x - centre) / len) / len.sqrt()))
                .collect()
        })
        .collect()
}

/// Largest interior entry of `op psi` over the probe states.
pub fn probe_residual(op: &BandMatrix, grid: &Grid, consts: &PhysicalConstants) -> f64 {
    let rows = EDGE_ROWS..grid.len().saturating_sub(EDGE_ROWS);
    probe_states(grid, consts)
        .iter()
        .map(|psi| op.apply(psi)[rows.clone()].iter().map(|z| z.norm()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

/// `dI/dt + (i/hbar)[H, I]` at `t`, with `dI/dt` by finite differences.
///
/// Uses a central difference when `t - dt` is available, otherwise a
/// second-order forward difference.
pub fn invariance_operator(
    spec: &InvariantSpec,
    basis: &dyn ClassicalBasis,
    sys: &LsodeSystem,
    grid: &Grid,
    consts: &PhysicalConstants,
    t: f64,
    dt: f64,
) -> Result<BandMatrix> {
    if !(dt > 0.0) {
        return Err(invalid(format!("dt must be positive, got {dt}")));
    }
    let inv = |s: f64| build_invariant(spec, basis, grid, consts, s).map(|o| o.matrix);
    let back_ok = t - dt >= basis.span().0 && sys.check_time(t - dt).is_ok();
    let i0 = inv(t)?;
    let didt = if back_ok {
        inv(t + dt)?.sub(&inv(t - dt)?).scaled(Complex64::from(0.5 / dt))
    } else {
        inv(t + dt)?
            .scaled(Complex64::from(4.0))
            .sub(&i0.scaled(Complex64::from(3.0)))
            .sub(&inv(t + 2.0 * dt)?)
            .scaled(Complex64::from(0.5 / dt))
    };
    let h = build_gck_hamiltonian(sys, grid, consts, t)?;
    Ok(didt.add_scaled(&h.matrix.commutator(&i0), Complex64::new(0.0, 1.0 / consts.hbar)))
}

/// Invariance defect measured on smooth probe states in interior rows.
pub fn invariance_residual(
    spec: &InvariantSpec,
    basis: &dyn ClassicalBasis,
    sys: &LsodeSystem,
    grid: &Grid,
    consts: &PhysicalConstants,
    t: f64,
    dt: f64,
) -> Result<f64> {
    let r = invariance_operator(spec, basis, sys, grid, consts, t, dt)?;
    Ok(probe_residual(&r, grid, consts))
}

/// Trapezoidal `<psi|O|psi>`.
pub fn expectation(op: &OperatorMatrix, psi: &WaveFunction) -> Result<Complex64> {
    if !op.grid.same_as(&psi.grid) {
        return Err(Error::GridMismatch);
    }
    let o = op.apply(&psi.samples);
    Ok((0..o.len()).map(|i| psi.grid.weight(i) * psi.samples[i].conj() * o[i]).sum())
}

fn hermitian_eigen(op: &OperatorMatrix) -> Result<SymmetricEigen<Complex64, nalgebra::Dyn>> {
    if !op.hermitian {
        return Err(invalid("dense eigensolve needs a Hermitian operator"));
    }
    Ok(SymmetricEigen::new(op.matrix.to_dense()))
}

fn sorted_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    idx
}

/// Lowest `k` eigenvalues of a Hermitian operator (dense solve).
pub fn lowest_eigenvalues(op: &OperatorMatrix, k: usize) -> Result<Vec<f64>> {
    let eig = hermitian_eigen(op)?;
    let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    Ok(sorted_order(&vals).into_iter().take(k).map(|i| vals[i]).collect())
}

/// Lowest `k` eigenpairs, eigenvectors as grid-normalized wavefunctions.
pub fn lowest_eigenstates(
    op: &OperatorMatrix,
    k: usize,
    consts: &PhysicalConstants,
) -> Result<Vec<(f64, WaveFunction)>> {
    let eig = hermitian_eigen(op)?;
    let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    sorted_order(&vals)
        .into_iter()
        .take(k)
        .map(|i| {
            let v: Vec<Complex64> = eig.eigenvectors.column(i).iter().copied().collect();
            Ok((vals[i], WaveFunction::new(op.grid, v, op.t, *consts)?.normalized()))
        })
        .collect()
}

/// Exportable eigenvalue list.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub system: String,
    pub spec: String,
    pub t: f64,
    pub eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn compute(system: &str, spec: &InvariantSpec, op: &OperatorMatrix, k: usize) -> Result<Self> {
        Ok(Self { system: system.to_string(), spec: spec.label.clone(), t: op.t, eigenvalues: lowest_eigenvalues(op, k)? })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "system": self.system,
            "spec": self.spec,
            "t": json_f64(self.t),
            "eigenvalues": self.eigenvalues.iter().map(|&v| json_f64(v)).collect::<Vec<_>>(),
        })
    }
}
