//! Generalized Caldirola–Kanai classical systems `ẍ + ḟẋ + ω²x = Λ`.
//!
//! A [`LsodeSystem`] holds its coefficient functions behind the
//! [`Coefficients`] trait; the [`catalog`] registers the named families the
//! command line can select. Canonical solution bases come either from the
//! adaptive integrator ([`integrate_classical`]) or from closed forms.

mod basis;
pub mod catalog;
mod integrate;
mod system;
mod zeros;

pub use basis::{
    closed_form_ck, closed_form_hermite, tilde_u2, wronskian, BasisPoint, BasisRef, BasisSource,
    CkBasis, CkRegime, ClassicalBasis, FreeBasis, HarmonicBasis, HermiteBasis, TildeU2,
};
pub use integrate::{integrate_classical, integrate_classical_with, IntegratorOptions, NumericBasis};
pub use system::{
    lane_emden_system, CaldirolaKanai, Coefficients, EngineeredUndamped, Free, FnCoefficients, Harmonic,
    HermiteOscillator, LaneEmden, LsodeSystem, Tabulated,
};
pub use zeros::{count_zeros, scan_zeros, ZeroSample, ZeroScan};
