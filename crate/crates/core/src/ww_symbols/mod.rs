//! Gravity-capillary symbols of a sampled surface: Dirichlet–Neumann and
//! curvature symbols, the symmetrizer, `γ`, `ω`, the Hessian floor of `γ`
//! and the semi-norms entering the Strichartz constant.

mod seminorms;
mod surface;
mod symbols;

pub use seminorms::{symbol_seminorms, SymbolSemiNorms, TimeSlice};
pub use surface::{trace_velocities, Geometry, SurfacePreset, SurfaceState};
pub use symbols::{
    annulus_samples, curvature_symbols, dn_symbols, gamma_hessian, gamma_omega, gamma_value, hessian_det_gamma, l1_value,
    l2_value, lambda0_value, lambda1_value, omega_value, symmetrizer, HessianWitness, WWSymbolSet,
};
