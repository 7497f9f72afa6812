//! Dyadic regularization, semiclassical rescaling and Lagrangian straightening.
//!
//! One dyadic block of the linearized equation is rewritten with `h = 2^{−j}` and
//! `σ = h^{−1/2}t`, the transport term is removed by the flow `X_h`, and the dispersive
//! symbol is pulled back to the straightened frame. Everything past the regularization
//! is one-dimensional.

mod frame;
mod params;
mod pullback;
mod regularize;

pub use frame::{integrate_straightening, integrate_straightening_with, FlowState, StraightenedFrame, FRAME_NODES};
pub use params::{SemiclassicalParams, VelocityPreset};
pub use pullback::{check_symbol_class, PulledBackSymbols, SymbolClassRow};
pub use regularize::{
    build_gamma_h, build_l_j, radial_profile, rescale_to_physical, rescale_to_semiclassical, rescaling_defect, GammaH,
    LocalizedOperator, RegularizationRecord,
};
