//! Semiclassical parametrix `𝒦` for `h∂_σ + iP` on the window `σ ∈ [0, h^δ]`.
//!
//! Bicharacteristics of `p` carry the phase through the Hamilton–Jacobi equation and the
//! amplitude through the transport equation; the oscillatory integral is then evaluated
//! on the frequency lattice of the data. One space dimension only.

pub(crate) mod amplitude;
pub(crate) mod characteristics;
pub(crate) mod fio;
pub(crate) mod phase;

pub use amplitude::{amplitudes, b0, chi, chi_one, exponent_by_quadrature, localizer, transport_coefficients, AmplitudeOrder};
pub use characteristics::{solve_characteristics, Bicharacteristics, CharacteristicsConfig, TrajState};
pub use fio::{
    apply_parametrix, banded_data, flat_propagator, initial_error, interpolation_defect, l2_gain, residual, ResidualRecord,
    ResidualSample,
};
pub use phase::{
    eikonal_residual, eikonal_sweep, eval_phase, eval_phase_node, gradient_identity_defects, hessian_floor, phase_hessian,
    sigma_stencil, theta, PhaseHessian, PhaseSample,
};
