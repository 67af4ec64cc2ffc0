//! Arnold–Ermakov–Pinney transformations for damped and time-dependent
//! quantum oscillators.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: Hermite polynomials, Kummer's ₁F₁, erfi and integer-order
//!   parabolic cylinder functions.
//! - [`lsode`]: Generalized Caldirola–Kanai systems, their canonical classical
//!   solution bases (numeric and closed form) and a by-name system catalog.
//! - [`arnold`]: classical Arnold and Arnold–Ermakov–Pinney maps, Ermakov and
//!   Pinney machinery, classical Lewis invariants.
//! - [`quantum`]: grids, wavefunctions, the unitary lifts of the maps and exact
//!   eigenstate constructors.
//! - [`invariants`]: banded operator matrices for the Hamiltonian, the
//!   conserved position/momentum pair and the quadratic invariant family.
//! - [`propagator`]: a Crank–Nicolson integrator of the Schrödinger equation
//!   used as an independent oracle.
//! - [`io`]: CSV, JSON and binary export.

pub mod arnold;
pub mod error;
pub mod invariants;
pub mod io;
pub mod lsode;
pub mod numerics;
pub mod propagator;
pub mod quantum;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;
