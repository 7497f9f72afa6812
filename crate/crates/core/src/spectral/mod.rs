//! Periodic spectral backbone: grids, Fourier multipliers, Littlewood–Paley
//! blocks and the norm estimators used by every other module.
//!
//! Frequencies live on the lattice `2πk/L`. Spectra are normalized so that a
//! unit-amplitude mode has coefficient one.

mod cutoff;
mod field;
mod grid;
mod ops;

pub use cutoff::{annulus_radial, band, psi_radial, smooth_step, CutoffProfile};
pub use field::{fft_inplace, forward, inverse, SpectralField, C64};
pub use grid::{dot, norm, PeriodicGrid, Vec2};
pub use ops::{
    apply_multiplier, apply_real_multiplier, holder_norm, low_pass, lp_block, max_block, sobolev_norm,
    zygmund_norm,
};

#[cfg(test)]
mod proptests;
