//! Wavefunctions on uniform grids, the QAT/QAEPT maps acting on them, and
//! exact eigenstate constructors.

mod grid;
mod interp;
mod maps;
mod states;

pub use grid::{Grid, PhysicalConstants, WaveFunction};
pub use interp::{CubicLagrange, Interpolator, InterpolatorRef, InterpolatorRegistry, Sinc};
pub use maps::{qaept_apply, qaept_apply_with, qaept_inverse, qaept_inverse_with, qat_forward, MapOptions, MappedState};
pub use states::{
    ck_eigenstate, dm_eigenstate, dm_eigenstate_on, gaussian_packet, ho_eigenstate, lewis_phase, lewis_phase_weighted,
    EDGE_AMPLITUDE_TOL,
};
