use super::cutoff::CutoffProfile;
use super::field::{SpectralField, C64};
use super::grid::{norm, Vec2};
use crate::error::{Error, Result};

/// `m(D)u`: multiply every lattice coefficient by `m(ξ)`.
pub fn apply_multiplier(u: &SpectralField, m: impl Fn(Vec2) -> C64) -> Result<SpectralField> {
    if !u.is_finite() {
        return Err(Error::InvalidInput("field has non-finite samples".into()));
    }
    let grid = u.grid();
    let mut spec = Vec::with_capacity(grid.len());
    for (i, &c) in u.spectrum().iter().enumerate() {
        let xi = grid.frequency(i);
        let mv = m(xi);
        if !(mv.re.is_finite() && mv.im.is_finite()) {
            return Err(Error::InvalidInput(format!("multiplier is not finite at ξ = {:?}", xi)));
        }
        spec.push(c * mv);
    }
    SpectralField::from_spectrum(grid, spec)
}

pub fn apply_real_multiplier(u: &SpectralField, m: impl Fn(Vec2) -> f64) -> Result<SpectralField> {
    apply_multiplier(u, |xi| C64::new(m(xi), 0.0))
}

/// `Δ_k u`, with `Δ_0 = ψ(D)`.
pub fn lp_block(u: &SpectralField, k: u32) -> SpectralField {
    let c = CutoffProfile;
    apply_real_multiplier(u, |xi| c.phi(xi, k)).expect("cutoff multipliers are finite")
}

/// `S_k u = ψ(2^{-k}D)u`.
pub fn low_pass(u: &SpectralField, k: f64) -> SpectralField {
    let c = CutoffProfile;
    apply_real_multiplier(u, |xi| c.psi_level(xi, k)).expect("cutoff multipliers are finite")
}

/// Highest block index carrying lattice frequencies.
pub fn max_block(u: &SpectralField) -> u32 {
    let g = u.grid();
    let r = g.nyquist() * if g.dim() == 2 { 2f64.sqrt() } else { 1.0 };
    CutoffProfile.max_block(r)
}

/// `max_q 2^{qs} ‖Δ_q u‖_∞` over the representable blocks.
pub fn zygmund_norm(u: &SpectralField, s: f64) -> f64 {
    (0..=max_block(u)).map(|q| (q as f64 * s).exp2() * lp_block(u, q).max_abs()).fold(0.0, f64::max)
}

/// `(Σ_ξ (1+|ξ|²)^s |û(ξ)|² · L^d)^{1/2}`; equals the grid L² norm at `s = 0`.
pub fn sobolev_norm(u: &SpectralField, s: f64) -> f64 {
    let g = u.grid();
    let sum: f64 = u
        .spectrum()
        .iter()
        .enumerate()
        .map(|(i, c)| (1.0 + norm(g.frequency(i)).powi(2)).powf(s) * c.norm_sqr())
        .sum();
    (sum * g.volume()).sqrt()
}

/// Hölder norm of order `r`: the Zygmund norm for non-integer `r`, and the largest
/// grid maximum of a spectral derivative of order `≤ r` for integer `r`.
pub fn holder_norm(u: &SpectralField, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!("Hölder order must be positive, got {r}")));
    }
    if r.fract() != 0.0 {
        return Ok(zygmund_norm(u, r));
    }
    let n = r as usize;
    let mut best = u.max_abs();
    let dim = u.grid().dim();
    let mut layer = vec![u.clone()];
    for _ in 0..n {
        let mut next = Vec::new();
        for f in &layer {
            for axis in 0..dim {
                let d = f.derivative(axis);
                best = best.max(d.max_abs());
                next.push(d);
            }
        }
        layer = next;
    }
    Ok(best)
}
