//! Cutoffs, transport coefficients and the amplitude hierarchy.

use super::characteristics::Bicharacteristics;
use super::phase::eval_phase;
use crate::error::{Error, Result};
use crate::spectral::{annulus_radial, band, psi_radial};

/// Cauchy data `χ`: 1 on `3/4 ≤ |η| ≤ 3/2`, supported in `1/2 ≤ |η| ≤ 2`.
pub fn chi(eta: f64) -> f64 {
    band(eta.abs(), 0.5, 0.75, 1.5, 2.0)
}

/// `χ₁ = φ₁`, equal to 1 on `supp χ`.
pub fn chi_one(eta: f64) -> f64 {
    annulus_radial(eta.abs())
}

/// The localizer `ψ(κ − y′)`: 1 for `|z| ≤ 1`, 0 for `|z| ≥ 2`.
pub fn localizer(z: f64) -> f64 {
    psi_radial(z.abs())
}

/// `a = ∂_ζ p(σ, y, ∂_yφ)` and `c = ∂_ζ∂_{y′}p̃(σ, y, y, ∂_yφ) + ½ ∂²_ζ p(σ, y, ∂_yφ) ∂²_yφ`.
pub fn transport_coefficients(b: &Bicharacteristics, sigma: f64, y: f64, eta: f64) -> Result<(f64, f64)> {
    let s = eval_phase(b, sigma, y, eta)?;
    let (jet, cross) = b.symbols().hamiltonian(sigma, y, s.dphi_dy);
    Ok((jet.d[1], cross + 0.5 * jet.h[1][1] * s.phi_yy))
}

/// Truncation order `N` of `b = Σ_{k≤N} h^{kν} b_k`.
///
/// The sources of `b_k`, `k ≥ 1`, sum over `2 ≤ |α| ≤ N − 1` and vanish identically for
/// `N ≤ 2`, so those orders reduce to `b = b₀`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AmplitudeOrder(usize);

impl AmplitudeOrder {
    pub fn new(n: usize) -> Result<Self> {
        if n > 2 {
            // TODO: the |α| = 2 source term, ∂²_z[(∂²_η p̃)(y, z, θ(y, z)) b₀(z)], is needed for N ≥ 3
            return Err(Error::InvalidInput(format!("amplitude order {n} needs the |α| = 2 transport source; supported orders are 0..=2")));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// `b₀ = χ(η) exp(−∫₀^σ c)` along the trajectory through `(σ, y)`.
pub fn b0(b: &Bicharacteristics, sigma: f64, y: f64, eta: f64) -> Result<f64> {
    let x = chi(eta);
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(x * (-eval_phase(b, sigma, y, eta)?.exponent).exp())
}

/// `[b₀, …, b_N]`; the corrections are zero for the supported orders.
pub fn amplitudes(b: &Bicharacteristics, order: AmplitudeOrder, sigma: f64, y: f64, eta: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; order.get() + 1];
    out[0] = b0(b, sigma, y, eta)?;
    Ok(out)
}

/// `∫₀^σ c(s, Y(s), η) ds` by composite Simpson along the trajectory ending at `(σ, y)`,
/// evaluating `c` afresh at every node; an independent check of the integrated exponent.
pub fn exponent_by_quadrature(b: &Bicharacteristics, sigma: f64, y: f64, eta: f64, panels: usize) -> Result<f64> {
    let n = 2 * panels.max(1);
    let kappa = eval_phase(b, sigma, y, eta)?.kappa;
    let ds = sigma / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let s = i as f64 * ds;
        let ys = b.shoot(s, kappa, eta)[0];
        let (_, c) = transport_coefficients(b, s, ys, eta)?;
        let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * c;
    }
    Ok(acc * ds / 3.0)
}
