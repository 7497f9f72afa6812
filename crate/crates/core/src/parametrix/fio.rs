//! The oscillatory integral `𝒦v`, its residual `R_h` and initial error `r_h`.
//!
//! On the torus the `η`-integral becomes the lattice sum over `η = hk`, so
//! `𝒦v(σ, y) = Σ_k v̂_k e^{iky} e^{iD(σ,y,hk)/h} χ(hk) e^{−E(σ,y,hk)}` with
//! `D = φ − yη` and `E` the transport exponent. `D` and `E` are known on the
//! Chebyshev `η` lattice of the characteristics and interpolated to `hk`.

use rayon::prelude::*;

use super::amplitude::{chi, localizer, AmplitudeOrder};
use super::characteristics::Bicharacteristics;
use super::phase::{eval_phase, sigma_stencil};
use crate::error::{Error, Result};
use crate::spectral::{PeriodicGrid, SpectralField, C64};

/// `D` and `E` (and optionally their σ-derivatives) on `etas × ys` at one σ.
struct Tables {
    /// `[ie][iy] → (D, E, ∂_σD, ∂_σE)`.
    data: Vec<Vec<[f64; 4]>>,
}

fn node_index(b: &Bicharacteristics, sigma: f64) -> Option<usize> {
    let x = sigma / b.dsigma();
    let k = x.round();
    ((x - k).abs() <= 1e-9 && k >= 0.0 && k as usize <= b.steps()).then_some(k as usize)
}

fn tables(b: &Bicharacteristics, ys: &[f64], sigma: f64, with_derivative: bool) -> Result<Tables> {
    if !(0.0..=b.window() * (1.0 + 1e-12)).contains(&sigma) {
        return Err(Error::InvalidInput(format!("σ = {sigma} outside the window [0, {}]", b.window())));
    }
    let node = node_index(b, sigma);
    if with_derivative && node.is_none() {
        return Err(Error::InvalidInput(format!("σ = {sigma} is not a stored node")));
    }
    let data = (0..b.etas().len())
        .into_par_iter()
        .map(|ie| {
            let eta = b.etas()[ie];
            let mut row = Vec::with_capacity(ys.len());
            let mut guess = ys[0];
            let mut prev_y = ys[0];
            for &y in ys {
                guess += y - prev_y;
                prev_y = y;
                let entry = match node {
                    Some(k) if with_derivative => {
                        let (nodes, w) = sigma_stencil(b, k, 9);
                        let mut out = [0.0; 4];
                        for (&m, &wm) in nodes.iter().zip(&w) {
                            let (kappa, i, e) = b.invert_fast(ie, m, y, guess)?;
                            let d = (kappa - y) * eta + i;
                            if m == k {
                                out[0] = d;
                                out[1] = e;
                                guess = kappa;
                            }
                            out[2] += wm * d;
                            out[3] += wm * e;
                        }
                        out
                    }
                    Some(k) => {
                        let (kappa, i, e) = b.invert_fast(ie, k, y, guess)?;
                        guess = kappa;
                        [(kappa - y) * eta + i, e, 0.0, 0.0]
                    }
                    None => {
                        let (kappa, s) = b.invert_node(ie, sigma, y, Some(guess))?;
                        guess = kappa;
                        [(kappa - y) * eta + s[6], s[7], 0.0, 0.0]
                    }
                };
                row.push(entry);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Tables { data })
}

fn check_input(b: &Bicharacteristics, v: &SpectralField) -> Result<f64> {
    let grid = v.grid();
    if grid.dim() != 1 || (grid.extent() - 2.0 * std::f64::consts::PI).abs() > 1e-12 {
        return Err(Error::InvalidInput("the parametrix acts on 2π-periodic functions of one variable".into()));
    }
    let h = b.symbols().frame().params().h();
    let (mut outside, mut total) = (0.0, 0.0);
    for (i, c) in v.spectrum().iter().enumerate() {
        let e = c.norm_sqr();
        total += e;
        let eta = (h * grid.wavenumber(i) as f64).abs();
        if !(0.25..=4.0).contains(&eta) {
            outside += e;
        }
    }
    if outside > 1e-24 * total {
        return Err(Error::InvalidInput(format!("data carries {:.1e} of its energy outside 1/4 ≤ |hξ| ≤ 4", outside / total)));
    }
    Ok(h)
}

/// Sums `Σ_k v̂_k e^{iky} e^{iD/h} χ e^{−E} · weight(D′, E′)` over the lattice frequencies.
fn assemble(
    b: &Bicharacteristics,
    v: &SpectralField,
    t: &Tables,
    weight: impl Fn(f64, f64) -> C64 + Sync,
) -> Result<SpectralField> {
    let grid = v.grid();
    let h = b.symbols().frame().params().h();
    let n = b.chebyshev().nodes().len();
    let (lo, hi) = b.config().eta_range;
    // (k, v̂_k, χ(hk), block offset, Chebyshev cardinals)
    let modes: Vec<(f64, C64, f64, usize, Vec<f64>)> = v
        .spectrum()
        .iter()
        .enumerate()
        .filter_map(|(i, &c)| {
            let k = grid.wavenumber(i) as f64;
            let eta = h * k;
            let x = chi(eta);
            if x == 0.0 || c == C64::new(0.0, 0.0) || eta.abs() < lo || eta.abs() > hi {
                return None;
            }
            let offset = if eta > 0.0 { 0 } else { n };
            Some((k, c, x, offset, b.chebyshev().cardinal(eta.abs())))
        })
        .collect();
    let out: Vec<C64> = (0..grid.len())
        .into_par_iter()
        .map(|iy| {
            let y = grid.point(iy)[0];
            let mut acc = C64::new(0.0, 0.0);
            for (k, c, x, offset, w) in &modes {
                let mut q = [0.0; 4];
                for (l, wl) in w.iter().enumerate() {
                    let e = &t.data[offset + l][iy];
                    for m in 0..4 {
                        q[m] += wl * e[m];
                    }
                }
                let phase = k * y + q[0] / h;
                acc += c * C64::from_polar(x * (-q[1]).exp(), phase) * weight(q[2], q[3]);
            }
            acc
        })
        .collect();
    SpectralField::from_values(grid, out)
}

fn lattice_points(grid: &PeriodicGrid) -> Vec<f64> {
    (0..grid.len()).map(|i| grid.point(i)[0]).collect()
}

/// `𝒦v(σ)` for `σ ∈ [0, h^δ]`, with `v̂` supported in `1/4 ≤ |hξ| ≤ 4`.
///
/// The amplitude is `b₀`; the supported corrections vanish. At `σ = 0` this is `χ(hD)v`.
pub fn apply_parametrix(b: &Bicharacteristics, v: &SpectralField, sigma: f64, order: AmplitudeOrder) -> Result<SpectralField> {
    let _ = order;
    check_input(b, v)?;
    let t = tables(b, &lattice_points(v.grid()), sigma, false)?;
    assemble(b, v, &t, |_, _| C64::new(1.0, 0.0))
}

/// `e^{−iσ|hD|^{3/2}/h} χ(hD) v`, the flat propagator on `supp χ`.
pub fn flat_propagator(v: &SpectralField, h: f64, sigma: f64) -> Result<SpectralField> {
    let grid = v.grid();
    let spec: Vec<C64> = v
        .spectrum()
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let eta = h * grid.wavenumber(i) as f64;
            c * C64::from_polar(chi(eta), -sigma * eta.abs().powf(1.5) / h)
        })
        .collect();
    SpectralField::from_spectrum(grid, spec)
}

/// `‖R_h(σ)‖ / ‖v‖` at one σ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualSample {
    pub sigma: f64,
    pub relative: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualRecord {
    pub j: u32,
    pub h: f64,
    pub samples: Vec<ResidualSample>,
    /// `sup_σ ‖R_h‖ / ‖v‖`.
    pub sup: f64,
}

/// `R_h = (h∂_σ + iP)𝒦v` at `count` equispaced stored nodes in `(0, h^δ]`.
///
/// `∂_σ` falls on `D` and `E` through a 9-point difference over the stored nodes;
/// `P` is applied to `𝒦v` on the lattice of `v`.
pub fn residual(b: &Bicharacteristics, v: &SpectralField, order: AmplitudeOrder, count: usize) -> Result<ResidualRecord> {
    let _ = order;
    let h = check_input(b, v)?;
    if count == 0 || b.steps() % count != 0 {
        return Err(Error::InvalidInput(format!("{count} residual nodes do not divide {} steps", b.steps())));
    }
    let ys = lattice_points(v.grid());
    let norm = v.l2_norm();
    let mut samples = Vec::with_capacity(count);
    for m in 1..=count {
        let k = b.steps() / count * m;
        let sigma = k as f64 * b.dsigma();
        let t = tables(b, &ys, sigma, true)?;
        let kv = assemble(b, v, &t, |_, _| C64::new(1.0, 0.0))?;
        let dkv = assemble(b, v, &t, |dd, de| C64::new(-h * de, dd))?;
        let pk = b.symbols().apply(sigma, &kv)?;
        let r = dkv.add(&pk.scale(C64::new(0.0, 1.0)));
        samples.push(ResidualSample { sigma, relative: r.l2_norm() / norm });
    }
    let sup = samples.iter().map(|s| s.relative).fold(0.0, f64::max);
    let p = b.symbols().frame().params();
    Ok(ResidualRecord { j: p.j(), h, samples, sup })
}

/// `r_h = 𝒦v(0) − χ(hD)v` when the kernel carries the localizer `ψ(κ − y′)`:
/// the convolution of `v` with `K_h(z)(ψ(z) − 1)`, `K_h` the periodic kernel of `χ(hD)`.
/// Returns `‖r_h‖ / ‖v‖`.
pub fn initial_error(v: &SpectralField, h: f64) -> Result<f64> {
    let grid = v.grid();
    if grid.dim() != 1 {
        return Err(Error::InvalidInput("initial error is computed in one dimension".into()));
    }
    let mult: Vec<C64> = (0..grid.len()).map(|i| C64::new(chi(h * grid.wavenumber(i) as f64), 0.0)).collect();
    // kernel samples K_h(z_i) = (2π)^{-1} Σ_k χ(hk) e^{ikz_i}
    let kernel = SpectralField::from_spectrum(grid, mult)?.scale(C64::new(1.0 / (2.0 * std::f64::consts::PI), 0.0));
    let g = SpectralField::from_values(
        grid,
        kernel
            .values()
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let z = grid.point(i)[0];
                let z = if z > std::f64::consts::PI { z - 2.0 * std::f64::consts::PI } else { z };
                k * (localizer(z) - 1.0)
            })
            .collect(),
    )?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = SpectralField::from_spectrum(grid, g.spectrum().iter().zip(v.spectrum()).map(|(a, b)| a * b * two_pi).collect())?;
    Ok(r.l2_norm() / v.l2_norm())
}

/// `sup |D_cheb − D_direct| / h` over sample `(y, η)` pairs at σ: the phase error, in
/// radians, introduced by interpolating from the Chebyshev lattice.
pub fn interpolation_defect(b: &Bicharacteristics, sigma: f64, samples: &[(f64, f64)]) -> Result<f64> {
    let h = b.symbols().frame().params().h();
    let n = b.chebyshev().nodes().len();
    samples
        .par_iter()
        .map(|&(y, eta)| {
            let t = tables(b, &[y], sigma, false)?;
            let offset = if eta > 0.0 { 0 } else { n };
            let w = b.chebyshev().cardinal(eta.abs());
            let d: f64 = w.iter().enumerate().map(|(l, wl)| wl * t.data[offset + l][0][0]).sum();
            let direct = eval_phase(b, sigma, y, eta)?.phi_shifted;
            Ok((d - direct).abs() / h)
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// `sup_σ ‖𝒦v(σ)‖ / ‖v‖` over the given σ values.
pub fn l2_gain(b: &Bicharacteristics, v: &SpectralField, sigmas: &[f64]) -> Result<f64> {
    let order = AmplitudeOrder::new(0)?;
    let mut out: f64 = 0.0;
    for &s in sigmas {
        out = out.max(apply_parametrix(b, v, s, order)?.l2_norm() / v.l2_norm());
    }
    Ok(out)
}

/// Seeded data with `v̂` a random multiple of `band(|hk|; 0.8, 0.9, 1.3, 1.4)`.
pub fn banded_data(grid: &PeriodicGrid, h: f64, seed: u64) -> Result<SpectralField> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let spec: Vec<C64> = (0..grid.len())
        .map(|i| {
            let w = crate::spectral::band((h * grid.wavenumber(i) as f64).abs(), 0.8, 0.9, 1.3, 1.4);
            let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            c * w
        })
        .collect();
    SpectralField::from_spectrum(grid, spec)
}
