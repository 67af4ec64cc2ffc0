use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::lsode::{BasisPoint, ClassicalBasis, LsodeSystem};
use crate::quantum::{Grid, PhysicalConstants};

use super::band::BandMatrix;

/// Hermiticity bound enforced on matrices flagged Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// An operator represented on a grid at a time stamp.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub grid: Grid,
    pub t: f64,
    pub hermitian: bool,
    pub matrix: BandMatrix,
}

impl OperatorMatrix {
    pub fn new(grid: Grid, t: f64, matrix: BandMatrix) -> Result<Self> {
        if matrix.dim() != grid.len() {
            return Err(invalid(format!("matrix of size {} on a {}-point grid", matrix.dim(), grid.len())));
        }
        Ok(Self { grid, t, hermitian: false, matrix })
    }

    /// Flags the matrix Hermitian after checking `||M - M^dagger||_max <= 1e-12`.
    pub fn hermitian(grid: Grid, t: f64, matrix: BandMatrix) -> Result<Self> {
        let err = matrix.hermiticity_error();
        if err > HERMITIAN_TOL {
            return Err(invalid(format!("matrix is not Hermitian (error {err:e})")));
        }
        Ok(Self { hermitian: true, ..Self::new(grid, t, matrix)? })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.matrix.apply(v)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix.sub(&other.matrix).max_abs()
    }
}

/// Fourth-order central first derivative, Dirichlet edges.
pub fn d1_stencil(grid: &Grid) -> BandMatrix {
    let h = 12.0 * grid.dx();
    BandMatrix::stencil(grid.len(), &[1.0 / h, -8.0 / h, 0.0, 8.0 / h, -1.0 / h])
}

/// Fourth-order central second derivative, Dirichlet edges.
pub fn d2_stencil(grid: &Grid) -> BandMatrix {
    let h = 12.0 * grid.dx() * grid.dx();
    BandMatrix::stencil(grid.len(), &[-1.0 / h, 16.0 / h, -30.0 / h, 16.0 / h, -1.0 / h])
}

pub fn position(grid: &Grid) -> BandMatrix {
    BandMatrix::real_diagonal(grid.points())
}

/// `-i hbar d/dx`.
pub fn momentum(grid: &Grid, consts: &PhysicalConstants) -> BandMatrix {
    d1_stencil(grid).scaled(Complex64::new(0.0, -consts.hbar))
}

/// `-hbar^2 d^2/dx^2`, the discrete `p^2`.
pub fn momentum_squared(grid: &Grid, consts: &PhysicalConstants) -> BandMatrix {
    d2_stencil(grid).scaled(Complex64::new(-consts.hbar * consts.hbar, 0.0))
}

/// Exact matrix symmetrization `(x p + p x) / 2`.
pub fn symmetrized_xp(grid: &Grid, consts: &PhysicalConstants) -> BandMatrix {
    let x = position(grid);
    let p = momentum(grid, consts);
    x.mul(&p).add(&p.mul(&x)).scaled(Complex64::new(0.5, 0.0))
}

/// `p2 * p^2 + x2 * x^2 + sym * (xp + px)/2 + x1 * x` with real coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadraticForm {
    pub p2: f64,
    pub x2: f64,
    pub sym: f64,
    pub x1: f64,
}

impl QuadraticForm {
    pub fn assemble(&self, grid: &Grid, consts: &PhysicalConstants) -> BandMatrix {
        let pot = BandMatrix::real_diagonal(grid.points().into_iter().map(|x| self.x2 * x * x + self.x1 * x));
        let mut m = momentum_squared(grid, consts).scaled(Complex64::new(self.p2, 0.0)).add(&pot);
        if self.sym != 0.0 {
            m = m.add_scaled(&symmetrized_xp(grid, consts), Complex64::new(self.sym, 0.0));
        }
        m
    }

    pub fn to_operator(&self, grid: &Grid, consts: &PhysicalConstants, t: f64) -> Result<OperatorMatrix> {
        OperatorMatrix::hermitian(*grid, t, self.assemble(grid, consts))
    }
}

pub(crate) fn check_mass(sys: &LsodeSystem, consts: &PhysicalConstants) -> Result<()> {
    let (a, b) = (sys.mass(), consts.m);
    if (a - b).abs() > 1e-12 * a.max(b) {
        return Err(invalid(format!("system mass {a} differs from the quantum mass {b}")));
    }
    Ok(())
}

/// Coefficients of the generalized Caldirola--Kanai Hamiltonian at `t`.
pub fn gck_form(sys: &LsodeSystem, consts: &PhysicalConstants, t: f64) -> Result<QuadraticForm> {
    sys.check_time(t)?;
    check_mass(sys, consts)?;
    let m = consts.m;
    let ef = sys.f(t).exp();
    Ok(QuadraticForm { p2: 0.5 / (m * ef), x2: 0.5 * m * sys.omega_sq(t) * ef, sym: 0.0, x1: -m * sys.lambda(t) * ef })
}

pub fn build_gck_hamiltonian(
    sys: &LsodeSystem,
    grid: &Grid,
    consts: &PhysicalConstants,
    t: f64,
) -> Result<OperatorMatrix> {
    gck_form(sys, consts, t)?.to_operator(grid, consts, t)
}

/// `X = a x + b p`, `P = d p + e x` in terms of the canonical basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedPair {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub e: f64,
}

impl ConservedPair {
    pub fn from_point(p: &BasisPoint, w: f64, m: f64) -> Self {
        Self { a: p.u1_dot / w, b: -p.u1 / m, d: p.u2, e: -m * p.u2_dot / w }
    }

    pub fn at(basis: &dyn ClassicalBasis, consts: &PhysicalConstants, t: f64) -> Result<Self> {
        check_mass(basis.system(), consts)?;
        let p = basis.eval(t)?;
        Ok(Self::from_point(&p, basis.system().wronskian(t), consts.m))
    }

    pub fn position(&self, grid: &Grid, consts: &PhysicalConstants) -> BandMatrix {
        position(grid).scaled(self.a.into()).add_scaled(&momentum(grid, consts), self.b.into())
    }

    pub fn momentum(&self, grid: &Grid, consts: &PhysicalConstants) -> BandMatrix {
        momentum(grid, consts).scaled(self.d.into()).add_scaled(&position(grid), self.e.into())
    }
}

pub fn conserved_position(
    basis: &dyn ClassicalBasis,
    grid: &Grid,
    consts: &PhysicalConstants,
    t: f64,
) -> Result<OperatorMatrix> {
    OperatorMatrix::hermitian(*grid, t, ConservedPair::at(basis, consts, t)?.position(grid, consts))
}

pub fn conserved_momentum(
    basis: &dyn ClassicalBasis,
    grid: &Grid,
    consts: &PhysicalConstants,
    t: f64,
) -> Result<OperatorMatrix> {
    OperatorMatrix::hermitian(*grid, t, ConservedPair::at(basis, consts, t)?.momentum(grid, consts))
}
