use rayon::prelude::*;

use super::symbols::annulus_samples;
use crate::error::{Error, Result};
use crate::paradiff::{xi_derivative_samples, SymbolField};
use crate::spectral::{holder_norm, zygmund_norm, PeriodicGrid, SpectralField};
use crate::util::quad::trapezoid;

/// `γ` and `ω` at one time.
#[derive(Clone, Debug)]
pub struct TimeSlice {
    pub t: f64,
    pub gamma: SymbolField,
    pub omega: SymbolField,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolSemiNorms {
    /// `𝒩_k(γ)`: `W^{1,∞}_x`, sup in time.
    pub n_gamma: f64,
    /// `𝓜_k(γ)`: `L^p_t W^{3/2,∞}_x`.
    pub m_gamma: f64,
    /// `𝒩_k(ω)`: `L^∞_x`, sup in time.
    pub n_omega: f64,
}

fn multi_indices(dim: usize, k: usize) -> Vec<[usize; 2]> {
    (0..=k)
        .flat_map(|n| (0..=n).map(move |a| [a, n - a]))
        .filter(|b| dim == 2 || b[1] == 0)
        .collect()
}

fn lp_in_time(t: &[f64], v: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return v.iter().copied().fold(0.0, f64::max);
    }
    let pw: Vec<f64> = v.iter().map(|x| x.powf(p)).collect();
    trapezoid(t, &pw).powf(1.0 / p)
}

/// `𝒩_k(γ)`, `𝓜_k(γ)` and `𝒩_k(ω)` over the time slices, with `ξ` sampled on `𝒞′`.
///
/// Slices must be ordered in time; `𝓜_k` integrates `‖D^β_ξ γ(t)‖^p` by the
/// trapezoid rule, so at least two slices are needed unless `p = ∞`.
pub fn symbol_seminorms(slices: &[TimeSlice], grid: &PeriodicGrid, k: usize, p: f64) -> Result<SymbolSemiNorms> {
    if k > 4 {
        return Err(Error::InvalidInput(format!("semi-norm order {k} exceeds 4")));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(format!("time exponent p must be ≥ 1, got {p}")));
    }
    if slices.is_empty() || (p.is_finite() && slices.len() < 2) {
        return Err(Error::Degenerate(format!("{} time slices for p = {p}", slices.len())));
    }
    if slices.windows(2).any(|w| !(w[1].t > w[0].t)) {
        return Err(Error::InvalidInput("time slices must be strictly increasing".into()));
    }
    let times: Vec<f64> = slices.iter().map(|s| s.t).collect();
    let freqs = annulus_samples(grid.dim());
    let field = |v| SpectralField::from_values(grid, v).expect("grid-sized samples");
    let mut out = SymbolSemiNorms { n_gamma: 0.0, m_gamma: 0.0, n_omega: 0.0 };
    for beta in multi_indices(grid.dim(), k) {
        // per ξ: (sup_t W^{1,∞}, L^p_t W^{3/2,∞}, sup_t L^∞ of ω)
        let per_xi: Vec<(f64, f64, f64)> = freqs
            .par_iter()
            .map(|&xi| {
                let mut w1 = 0.0f64;
                let mut w32 = Vec::with_capacity(slices.len());
                let mut om = 0.0f64;
                for s in slices {
                    let g = field(xi_derivative_samples(&s.gamma, grid, xi, beta));
                    w1 = w1.max(holder_norm(&g, 1.0).expect("order 1"));
                    w32.push(zygmund_norm(&g, 1.5));
                    om = om.max(field(xi_derivative_samples(&s.omega, grid, xi, beta)).max_abs());
                }
                (w1, lp_in_time(&times, &w32, p), om)
            })
            .collect();
        out.n_gamma += per_xi.iter().map(|v| v.0).fold(0.0, f64::max);
        out.m_gamma += per_xi.iter().map(|v| v.1).fold(0.0, f64::max);
        out.n_omega += per_xi.iter().map(|v| v.2).fold(0.0, f64::max);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ww_symbols::{gamma_omega, SurfacePreset, SurfaceState};
    use std::f64::consts::PI;

    fn grid() -> PeriodicGrid {
        PeriodicGrid::new(1, 2.0 * PI, 64).unwrap()
    }

    fn slices(s: &SurfaceState, times: &[f64]) -> Vec<TimeSlice> {
        let (gamma, omega) = gamma_omega(s);
        times.iter().map(|&t| TimeSlice { t, gamma: gamma.clone(), omega: omega.clone() }).collect()
    }

    #[test]
    fn flat_surface_values() {
        let g = grid();
        let sl = slices(&SurfaceState::flat(&g), &[0.0, 0.5, 1.0, 2.0]);
        let n = symbol_seminorms(&sl, &g, 0, 2.0).unwrap();
        assert!((n.n_gamma - 8.0).abs() < 1e-12);
        assert_eq!(n.n_omega, 0.0);
        // T^{1/p}·8 with T = 2
        assert!((n.m_gamma - 2f64.sqrt() * 8.0).abs() < 1e-12);
        let inf = symbol_seminorms(&sl[..1], &g, 0, f64::INFINITY).unwrap();
        assert!((inf.m_gamma - 8.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_in_k() {
        let g = grid();
        let s = SurfacePreset::Cosine { amplitude: 0.2, wavenumber: 1 }.build(&g).unwrap();
        let sl = slices(&s, &[0.0, 1.0]);
        let mut prev = SymbolSemiNorms { n_gamma: 0.0, m_gamma: 0.0, n_omega: 0.0 };
        for k in 0..=4 {
            let n = symbol_seminorms(&sl, &g, k, 2.0).unwrap();
            assert!(n.n_gamma >= prev.n_gamma && n.m_gamma >= prev.m_gamma && n.n_omega >= prev.n_omega);
            prev = n;
        }
    }

    #[test]
    fn n1_grows_with_amplitude() {
        let g = grid();
        let mut prev = 0.0;
        for a in [0.0, 0.1, 0.2, 0.4] {
            let s = SurfacePreset::Cosine { amplitude: a, wavenumber: 1 }.build(&g).unwrap();
            let n = symbol_seminorms(&slices(&s, &[0.0]), &g, 1, f64::INFINITY).unwrap();
            assert!(n.n_gamma >= prev, "a = {a}");
            prev = n.n_gamma;
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let g = grid();
        let sl = slices(&SurfaceState::flat(&g), &[0.0, 1.0]);
        assert!(symbol_seminorms(&sl, &g, 5, 2.0).is_err());
        assert!(symbol_seminorms(&sl[..1], &g, 1, 2.0).is_err());
        assert!(symbol_seminorms(&sl, &g, 1, 0.5).is_err());
        let rev = vec![sl[1].clone(), sl[0].clone()];
        assert!(symbol_seminorms(&rev, &g, 1, 2.0).is_err());
    }
}
