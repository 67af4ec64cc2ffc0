//! Grid matrices for the Hamiltonian, the conserved position and momentum
//! operators, and the quadratic invariant family built from them.

mod analysis;
mod assembly;
pub mod band;
mod operators;
mod spec;

pub use analysis::{
    expectation, invariance_operator, invariance_residual, lowest_eigenstates, lowest_eigenvalues, probe_residual,
    probe_states, Spectrum, EDGE_ROWS,
};
pub use assembly::{
    build_invariant, build_invariant_with, invariant_form, Algebraic, AssemblyRef, AssemblyRegistry, AssemblyStrategy,
    ProductForm,
};
pub use band::BandMatrix;
pub use operators::{
    build_gck_hamiltonian, conserved_momentum, conserved_position, d1_stencil, d2_stencil, gck_form, momentum,
    momentum_squared, position, symmetrized_xp, ConservedPair, OperatorMatrix, QuadraticForm, HERMITIAN_TOL,
};
pub use spec::{
    gdm_from_engineering, InvariantKind, InvariantKindRef, InvariantParams, InvariantRegistry, InvariantSpec,
    SpectrumRegime,
};
