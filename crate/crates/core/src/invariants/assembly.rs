use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lsode::ClassicalBasis;
use crate::quantum::{Grid, PhysicalConstants};

use super::operators::{ConservedPair, OperatorMatrix, QuadraticForm};
use super::spec::InvariantSpec;

/// How `I = P^2/2m + (1/2) m w~^2 X^2 + (g~/2)(XP + PX)/2` becomes a matrix.
pub trait AssemblyStrategy: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    fn assemble(
        &self,
        spec: &InvariantSpec,
        pair: &ConservedPair,
        grid: &Grid,
        consts: &PhysicalConstants,
        t: f64,
    ) -> Result<OperatorMatrix>;
}

/// Expands the invariant into `A p^2 + B x^2 + C (xp + px)/2` and discretizes
/// `p^2` with the second-derivative stencil.
#[derive(Debug, Clone, Copy, Default)]
pub struct Algebraic;

/// Coefficients of the expanded invariant.
pub fn invariant_form(spec: &InvariantSpec, pair: &ConservedPair, m: f64) -> QuadraticForm {
    let ConservedPair { a, b, d, e } = *pair;
    let (w2, hg) = (spec.omega_tilde_sq, 0.5 * spec.gamma_tilde);
    QuadraticForm {
        p2: d * d / (2.0 * m) + 0.5 * m * w2 * b * b + hg * b * d,
        x2: e * e / (2.0 * m) + 0.5 * m * w2 * a * a + hg * a * e,
        sym: d * e / m + m * w2 * a * b + hg * (a * d + b * e),
        x1: 0.0,
    }
}

impl AssemblyStrategy for Algebraic {
    fn name(&self) -> &'static str {
        "algebraic"
    }
    fn assemble(
        &self,
        spec: &InvariantSpec,
        pair: &ConservedPair,
        grid: &Grid,
        consts: &PhysicalConstants,
        t: f64,
    ) -> Result<OperatorMatrix> {
        invariant_form(spec, pair, consts.m).to_operator(grid, consts, t)
    }
}

/// Literal matrix products of the discrete `X` and `P`.
///
/// `P P` squares the first-derivative stencil, which leaves the
/// alternating grid mode almost free of kinetic energy; the spectrum then
/// carries spurious low eigenvalues. Kept for comparison.
#[derive(Debug, Clone, Copy, Default)]
pub struct ProductForm;

impl AssemblyStrategy for ProductForm {
    fn name(&self) -> &'static str {
        "product"
    }
    fn assemble(
        &self,
        spec: &InvariantSpec,
        pair: &ConservedPair,
        grid: &Grid,
        consts: &PhysicalConstants,
        t: f64,
    ) -> Result<OperatorMatrix> {
        let m = consts.m;
        let x = pair.position(grid, consts);
        let p = pair.momentum(grid, consts);
        let sym = x.mul(&p).add(&p.mul(&x));
        let mat = p
            .mul(&p)
            .scaled(Complex64::from(0.5 / m))
            .add_scaled(&x.mul(&x), Complex64::from(0.5 * m * spec.omega_tilde_sq))
            .add_scaled(&sym, Complex64::from(0.25 * spec.gamma_tilde))
            .hermitian_part();
        OperatorMatrix::hermitian(*grid, t, mat)
    }
}

pub type AssemblyRef = Arc<dyn AssemblyStrategy>;

#[derive(Debug, Clone)]
pub struct AssemblyRegistry {
    strategies: Vec<AssemblyRef>,
}

impl Default for AssemblyRegistry {
    fn default() -> Self {
        Self { strategies: vec![Arc::new(Algebraic), Arc::new(ProductForm)] }
    }
}

impl AssemblyRegistry {
    pub fn register(&mut self, s: AssemblyRef) {
        self.strategies.retain(|x| x.name() != s.name());
        self.strategies.push(s);
    }

    pub fn get(&self, name: &str) -> Result<AssemblyRef> {
        self.strategies
            .iter()
            .find(|s| s.name() == name)
            .cloned()
            .ok_or_else(|| Error::UnknownName { kind: "assembly strategy", name: name.to_string() })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.strategies.iter().map(|s| s.name()).collect()
    }
}

pub fn build_invariant_with(
    strategy: &dyn AssemblyStrategy,
    spec: &InvariantSpec,
    basis: &dyn ClassicalBasis,
    grid: &Grid,
    consts: &PhysicalConstants,
    t: f64,
) -> Result<OperatorMatrix> {
    let pair = ConservedPair::at(basis, consts, t)?;
    strategy.assemble(spec, &pair, grid, consts, t)
}

/// Invariant matrix with the default algebraic assembly.
pub fn build_invariant(
    spec: &InvariantSpec,
    basis: &dyn ClassicalBasis,
    grid: &Grid,
    consts: &PhysicalConstants,
    t: f64,
) -> Result<OperatorMatrix> {
    build_invariant_with(&Algebraic, spec, basis, grid, consts, t)
}
