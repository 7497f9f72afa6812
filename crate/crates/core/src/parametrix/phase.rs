//! The eikonal phase `φ(σ, y, η) = κη + I(σ; κ)` with `κ = κ(σ; y, η)`.

use rayon::prelude::*;

use super::characteristics::{Bicharacteristics, TrajState};
use crate::error::Result;
use crate::util::fd::fornberg;
use crate::util::quad::gauss_legendre_unit;

/// Phase data at one `(σ, y, η)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseSample {
    /// `κ = ∂φ/∂η`.
    pub kappa: f64,
    pub phi: f64,
    /// `φ − yη`, computed without the cancellation in `φ` itself.
    pub phi_shifted: f64,
    /// `∂φ/∂y = ζ(σ; κ, η)`.
    pub dphi_dy: f64,
    /// `∂²φ/∂y² = (∂ζ/∂y₀)/(∂y/∂y₀)` at `κ`.
    pub phi_yy: f64,
    /// `∂²φ/∂η² = ∂κ/∂η = −(∂y/∂η)/(∂y/∂y₀)` at `κ`.
    pub phi_etaeta: f64,
    /// `∫₀^σ c` along the trajectory through `(σ, y)`.
    pub exponent: f64,
}

impl PhaseSample {
    fn from_state(y: f64, eta: f64, kappa: f64, s: &TrajState) -> Self {
        let phi_shifted = (kappa - y) * eta + s[6];
        Self {
            kappa,
            phi: y * eta + phi_shifted,
            phi_shifted,
            dphi_dy: s[1],
            phi_yy: s[3] / s[2],
            phi_etaeta: -s[4] / s[2],
            exponent: s[7],
        }
    }
}

/// `(φ, ∂_yφ, ∂_ηφ)` and the derived second derivatives at arbitrary `η`, by single-trajectory shooting.
pub fn eval_phase(b: &Bicharacteristics, sigma: f64, y: f64, eta: f64) -> Result<PhaseSample> {
    let (kappa, s) = b.invert_flow(sigma, y, eta)?;
    Ok(PhaseSample::from_state(y, eta, kappa, &s))
}

/// Same quantities at a lattice value `η = etas[ie]`, from the stored trajectories.
pub fn eval_phase_node(b: &Bicharacteristics, ie: usize, sigma: f64, y: f64, guess: Option<f64>) -> Result<PhaseSample> {
    let (kappa, s) = b.invert_node(ie, sigma, y, guess)?;
    Ok(PhaseSample::from_state(y, b.etas()[ie], kappa, &s))
}

/// Stencil of `width` stored σ-nodes around `k` (shifted inwards at the ends) and the
/// Fornberg weights of the first derivative at node `k`.
pub fn sigma_stencil(b: &Bicharacteristics, k: usize, width: usize) -> (Vec<usize>, Vec<f64>) {
    let n = b.steps();
    let width = width.min(n + 1);
    let start = k.saturating_sub(width / 2).min(n + 1 - width);
    let nodes: Vec<usize> = (start..start + width).collect();
    let x: Vec<f64> = nodes.iter().map(|&m| (m as f64 - k as f64) * b.dsigma()).collect();
    let w = fornberg(0.0, &x, 1).swap_remove(1);
    (nodes, w)
}

/// Eikonal check at one node: `|∂_σφ + p(σ, y, ∂_yφ)| / (1 + |p|)`, with `∂_σφ` from a
/// 9-point difference of `φ − yη` over the stored σ-nodes.
pub fn eikonal_residual(b: &Bicharacteristics, ie: usize, k: usize, y: f64) -> Result<f64> {
    let (nodes, w) = sigma_stencil(b, k, 9);
    let sigma = k as f64 * b.dsigma();
    let centre = eval_phase_node(b, ie, sigma, y, None)?;
    let mut dphi = 0.0;
    for (&m, &wm) in nodes.iter().zip(&w) {
        let s = eval_phase_node(b, ie, m as f64 * b.dsigma(), y, Some(centre.kappa))?;
        dphi += wm * s.phi_shifted;
    }
    let p = b.symbols().p(sigma, y, centre.dphi_dy);
    Ok((dphi + p).abs() / (1.0 + p.abs()))
}

/// Largest eikonal residual over every `η` node, the given `y` points and σ-nodes.
pub fn eikonal_sweep(b: &Bicharacteristics, ys: &[f64], nodes: &[usize]) -> Result<f64> {
    let cases: Vec<(usize, usize, f64)> =
        (0..b.etas().len()).flat_map(|ie| nodes.iter().flat_map(move |&k| ys.iter().map(move |&y| (ie, k, y)))).collect();
    let r = cases.par_iter().map(|&(ie, k, y)| eikonal_residual(b, ie, k, y)).collect::<Result<Vec<_>>>()?;
    Ok(r.into_iter().fold(0.0, f64::max))
}

/// Relative defects of `∂φ/∂y = ζ(κ)` and `∂φ/∂η = κ` against centered differences of `φ`.
pub fn gradient_identity_defects(b: &Bicharacteristics, sigma: f64, y: f64, eta: f64) -> Result<(f64, f64)> {
    let c = eval_phase(b, sigma, y, eta)?;
    let e = 1e-4;
    let fy = |dy: f64| eval_phase(b, sigma, y + dy, eta).map(|s| s.phi);
    let fe = |de: f64| eval_phase(b, sigma, y, eta + de).map(|s| s.phi);
    let dy = (8.0 * (fy(e)? - fy(-e)?) - (fy(2.0 * e)? - fy(-2.0 * e)?)) / (12.0 * e);
    let de = (8.0 * (fe(e)? - fe(-e)?) - (fe(2.0 * e)? - fe(-2.0 * e)?)) / (12.0 * e);
    Ok(((dy - c.dphi_dy).abs() / c.dphi_dy.abs().max(1e-300), (de - c.kappa).abs() / c.kappa.abs().max(1.0)))
}

/// Phase Hessian in `η` from a fourth-order difference of `κ`, with `det / σ` (one dimension).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseHessian {
    pub det: f64,
    pub ratio: f64,
    /// The variational value `−(∂y/∂η)/(∂y/∂y₀)` for comparison.
    pub variational: f64,
}

pub fn phase_hessian(b: &Bicharacteristics, sigma: f64, y: f64, eta: f64) -> Result<PhaseHessian> {
    let e = 1e-3;
    let k = |d: f64| eval_phase(b, sigma, y, eta + d).map(|s| s.kappa);
    let det = (8.0 * (k(e)? - k(-e)?) - (k(2.0 * e)? - k(-2.0 * e)?)) / (12.0 * e);
    let variational = eval_phase(b, sigma, y, eta)?.phi_etaeta;
    Ok(PhaseHessian { det, ratio: det / sigma, variational })
}

/// `min |∂κ/∂η| / σ` over stored nodes, from the variational blocks.
pub fn hessian_floor(b: &Bicharacteristics, ys: &[f64], nodes: &[usize]) -> Result<f64> {
    let cases: Vec<(usize, usize, f64)> =
        (0..b.etas().len()).flat_map(|ie| nodes.iter().filter(|&&k| k > 0).flat_map(move |&k| ys.iter().map(move |&y| (ie, k, y)))).collect();
    let r = cases
        .par_iter()
        .map(|&(ie, k, y)| {
            let sigma = k as f64 * b.dsigma();
            eval_phase_node(b, ie, sigma, y, None).map(|s| s.phi_etaeta.abs() / sigma)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(r.into_iter().fold(f64::INFINITY, f64::min))
}

/// `θ(σ, y, y′, η) = ∫₀¹ ∂_yφ(σ, λy + (1−λ)y′, η) dλ` by 8-point Gauss–Legendre.
pub fn theta(b: &Bicharacteristics, sigma: f64, y: f64, yp: f64, eta: f64) -> Result<f64> {
    if y == yp {
        return Ok(eval_phase(b, sigma, y, eta)?.dphi_dy);
    }
    let (t, w) = gauss_legendre_unit(8);
    let mut acc = 0.0;
    for (&t, &w) in t.iter().zip(&w) {
        acc += w * eval_phase(b, sigma, yp + t * (y - yp), eta)?.dphi_dy;
    }
    Ok(acc)
}
