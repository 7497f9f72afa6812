//! Paradifferential and pseudodifferential quantization on the periodic lattice.
//!
//! `T_a` is applied through its spectral matrix
//! `M(ξ, η) = χ(ξ−η, η) â(ξ−η, η) ϱ(η)`, one column of `â` per active input
//! frequency. Grouping the columns by Littlewood–Paley block reproduces
//! `Σ_k S_{k−3}(a)(x, D) Δ_k ϱ(D)`, so the same loop serves both readings.

mod calculus;
mod operator;
mod seminorm;
mod symbol;

pub use calculus::{
    adjoint_remainder, calculus_probe_family, composition_remainder, dyadic_probes, lacunary, para_vs_smoothed_remainder, rayleigh_quotients,
    ProbeFamily, RemainderRecord,
};
pub use operator::{
    adjoint_symbol, aliasing_guard, apply_paradiff, apply_paradiff_adjoint, apply_pseudodiff, chi_cutoff, sharp,
    smooth_symbol, xi_derivative_samples, ALIAS_TOLERANCE, EPS1, EPS2,
};
pub use seminorm::{semi_norm, semi_norm_with, SemiNorm, XiSampling};
pub use symbol::{SymbolField, SymbolFn};

#[cfg(test)]
mod proptests;
