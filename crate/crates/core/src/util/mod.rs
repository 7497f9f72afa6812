//! Small numerical helpers shared across modules.

pub mod fd;
pub mod fit;
pub mod interp;
pub mod jet;
pub mod quad;
pub mod trig;

pub use fit::{linear_fit, log2_fit, DecayFit, LinearFit};
pub use jet::Jet;
pub use trig::TrigPoly;
