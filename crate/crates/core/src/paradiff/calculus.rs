//! Numerical probes of the symbolic calculus: remainder orders of compositions
//! and adjoints, the dyadic replacement `T_a Δ_j ≈ S_{j−3}(a)(x,D) Δ_j`, and
//! Rayleigh quotients for the operator-norm bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operator::{
    apply_paradiff, apply_paradiff_adjoint, apply_pseudodiff, adjoint_symbol, low_pass_symbol, sharp,
};
use super::seminorm::{semi_norm_with, XiSampling};
use super::symbol::SymbolField;
use crate::error::{Error, Result};
use crate::spectral::{lp_block, norm, sobolev_norm, PeriodicGrid, SpectralField, C64};
use crate::util::DecayFit;

/// Probes localized at frequency `2^j`: the modes `e^{±i 2^j x}` and a seeded random field in `Δ_j`.
pub fn dyadic_probes(grid: &PeriodicGrid, j: u32, seed: u64) -> Result<Vec<SpectralField>> {
    let dk = grid.dual_spacing();
    let k = ((j as f64).exp2() / dk).round() as i64;
    if grid.index_of_wavenumber(2 * k).is_none() {
        return Err(Error::InvalidInput(format!("grid cannot resolve probes at 2^{j}")));
    }
    let mode = |k: i64| {
        let mut spec = vec![C64::new(0.0, 0.0); grid.len()];
        spec[grid.index_of_wavenumber(k).expect("checked above")] = C64::new(1.0, 0.0);
        SpectralField::from_spectrum(grid, spec)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let spec: Vec<C64> = (0..grid.len())
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let noise = lp_block(&SpectralField::from_spectrum(grid, spec)?, j);
    Ok(vec![mode(k)?, mode(-k)?, noise])
}

fn worst_ratio(
    probes: &[SpectralField],
    op: impl Fn(&SpectralField) -> Result<SpectralField>,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for u in probes {
        worst = worst.max(op(u)?.l2_norm() / u.l2_norm());
    }
    Ok(worst)
}

/// Log₂-slope in `j` of `sup_probes ‖(T_a T_b − T_{a♯b})u_j‖ / ‖u_j‖`.
pub fn composition_remainder(
    a: &SymbolField,
    b: &SymbolField,
    rho: f64,
    grid: &PeriodicGrid,
    js: &[u32],
) -> Result<DecayFit> {
    if js.len() < 3 {
        return Err(Error::Degenerate(format!("{} probe scales, at least 3 required", js.len())));
    }
    let ab = sharp(a, b, rho, grid);
    let mut values = Vec::with_capacity(js.len());
    for &j in js {
        let probes = dyadic_probes(grid, j, 17)?;
        values.push(worst_ratio(&probes, |u| {
            let lhs = apply_paradiff(a, &apply_paradiff(b, u)?)?;
            Ok(lhs.sub(&apply_paradiff(&ab, u)?))
        })?);
    }
    DecayFit::new(js.iter().map(|&j| j as f64).collect(), values, 3)
}

/// Log₂-slope in `j` of `sup_probes ‖((T_a)^* − T_{a*})u_j‖ / ‖u_j‖`.
pub fn adjoint_remainder(a: &SymbolField, rho: f64, grid: &PeriodicGrid, js: &[u32]) -> Result<DecayFit> {
    if js.len() < 3 {
        return Err(Error::Degenerate(format!("{} probe scales, at least 3 required", js.len())));
    }
    let astar = adjoint_symbol(a, rho, grid);
    let mut values = Vec::with_capacity(js.len());
    for &j in js {
        let probes = dyadic_probes(grid, j, 29)?;
        values.push(worst_ratio(&probes, |u| Ok(apply_paradiff_adjoint(a, u)?.sub(&apply_paradiff(&astar, u)?)))?);
    }
    DecayFit::new(js.iter().map(|&j| j as f64).collect(), values, 3)
}

/// `Σ_{q=1}^{qmax} 2^{-qρ} cos(2^q x + q)`: one spectral line per octave, so it is
/// `C^ρ_*` and no smoother.
pub fn lacunary(x: f64, rho: f64, qmax: u32) -> f64 {
    (1..=qmax).map(|q| (-(q as f64) * rho).exp2() * ((q as f64).exp2() * x + q as f64).cos()).sum()
}

/// Symbols and scales on which the calculus remainder orders are measured.
///
/// With `b` independent of `x` the composition remainder of a first-order
/// transport symbol vanishes identically, so `b` carries a lacunary factor of
/// exactly the declared regularity.
#[derive(Clone, Debug)]
pub struct ProbeFamily {
    pub grid: PeriodicGrid,
    pub rho: f64,
    pub js: Vec<u32>,
    /// `a = i V(x) ξ` with smooth `V`, order 1.
    pub a: SymbolField,
    /// `b = (3/2 + W(x)) |ξ|^{3/2}` with `W` lacunary of order `ρ`, order 3/2.
    pub b: SymbolField,
    /// `i (3/2 + W(x)) ξ`, order 1, for the adjoint remainder.
    pub adjoint_probe: SymbolField,
}

pub fn calculus_probe_family() -> ProbeFamily {
    let grid = PeriodicGrid::new(1, 2.0 * std::f64::consts::PI, 2048).expect("valid grid");
    let rho = 2.0;
    let qmax = 8;
    let a = SymbolField::new(|x, xi| C64::new(0.0, (1.0 + 0.3 * x[0].cos() + 0.2 * (2.0 * x[0]).sin()) * xi[0]), 1.0, rho);
    let b = SymbolField::real(move |x, xi| (1.5 + lacunary(x[0], rho, qmax)) * norm(xi).powf(1.5), 1.5, rho);
    let adjoint_probe = SymbolField::new(move |x, xi| C64::new(0.0, (1.5 + lacunary(x[0], rho, qmax)) * xi[0]), 1.0, rho);
    ProbeFamily { grid, rho, js: vec![3, 4, 5, 6, 7], a, b, adjoint_probe }
}

/// Measurements attached to `R′_j u`.
#[derive(Clone, Debug, PartialEq)]
pub struct RemainderRecord {
    pub j: u32,
    /// Energy of `R′_j u` outside `2^{j−2} ≤ |ξ| ≤ 2^{j+2}`, relative to its total.
    pub outside_annulus: f64,
    /// `‖R′_j u‖_{H^{μ−m+ρ}} / ‖u‖_{H^μ}`.
    pub ratio: f64,
    /// `M^m_ρ(a)` on the frequencies up to `2^{j+2}`.
    pub seminorm: f64,
    /// `ratio / seminorm`.
    pub constant: f64,
}

/// `R′_j u = T_a Δ_j u − S_{j−3}(a)(x, D) Δ_j u`.
pub fn para_vs_smoothed_remainder(
    a: &SymbolField,
    u: &SpectralField,
    j: u32,
    mu: f64,
) -> Result<(SpectralField, RemainderRecord)> {
    if j < 1 {
        return Err(Error::InvalidInput("dyadic index must be at least 1".into()));
    }
    let grid = u.grid();
    let du = lp_block(u, j);
    let smoothed = low_pass_symbol(a, j as f64 - 3.0, grid);
    let r = apply_paradiff(a, &du)?.sub(&apply_pseudodiff(&smoothed, &du)?);

    let (lo, hi) = ((j as f64 - 2.0).exp2(), (j as f64 + 2.0).exp2());
    let (mut outside, mut total) = (0.0, 0.0);
    for (i, c) in r.spectrum().iter().enumerate() {
        let e = c.norm_sqr();
        total += e;
        let f = norm(grid.frequency(i));
        if f < lo || f > hi {
            outside += e;
        }
    }
    let outside_annulus = if total == 0.0 { 0.0 } else { outside / total };

    let (m, rho) = (a.order(), a.rho());
    let ratio = sobolev_norm(&r, mu - m + rho) / sobolev_norm(u, mu);
    let xmax = hi.min(grid.nyquist() / 2.0);
    let step = grid.dual_spacing().max(xmax / 256.0);
    let seminorm = semi_norm_with(a, m, rho, grid, XiSampling { step, max: xmax })?.value;
    let record = RemainderRecord { j, outside_annulus, ratio, seminorm, constant: ratio / seminorm };
    Ok((r, record))
}

/// `‖T_a u‖_{H^{μ−m}} / ‖u‖_{H^μ}` for each probe.
pub fn rayleigh_quotients(a: &SymbolField, probes: &[SpectralField], mu: f64) -> Result<Vec<f64>> {
    probes
        .iter()
        .map(|u| Ok(sobolev_norm(&apply_paradiff(a, u)?, mu - a.order()) / sobolev_norm(u, mu)))
        .collect()
}
