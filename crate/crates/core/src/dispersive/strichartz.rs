//! Empirical Strichartz quotients on dyadic blocks.
//!
//! For `u₀ = Δ_j u₀` the estimate `‖u‖_{L^p(0,T; W^{s−1/2+μ,∞})} ≲ ‖u₀‖_{H^s}` reads
//! `2^{j(μ−1/2)} ‖u‖_{L^p L^∞} / ‖u₀‖_{L²} ≲ 1`; the weighted quotient is tracked over `j`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::propagate::{reference_propagate, Direction, Generator, Quantization};
use crate::error::{Error, Result};
use crate::semiclassical::{PulledBackSymbols, SemiclassicalParams, VelocityPreset};
use crate::spectral::{lp_block, PeriodicGrid, SpectralField, C64};
use crate::util::{linear_fit, quad::trapezoid};
use crate::ww_symbols::SurfacePreset;

/// `sup_x |u(t)|` along an evolution of block-localized data.
pub trait DyadicEvolution: Sync {
    fn grid(&self, j: u32) -> Result<PeriodicGrid>;
    fn horizon(&self) -> f64;
    /// `(t, sup_x |u(t)|)` on `[0, horizon]`; `focus` is the time the data was aimed at.
    fn sup_profile(&self, j: u32, u0: &SpectralField, focus: f64) -> Result<Vec<(f64, f64)>>;
}

/// `u_t + i|D|^{3/2}u = 0` on a torus long enough that no packet wraps before `T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlatModel {
    pub extent: f64,
    pub points: usize,
    pub horizon: f64,
}

impl Default for FlatModel {
    fn default() -> Self {
        Self { extent: 64.0, points: 1 << 15, horizon: 1.0 }
    }
}

/// Sample times resolving a focus at `t0` of duration `2^{−3j/2}`.
fn focal_times(j: u32, t0: f64, horizon: f64) -> Vec<f64> {
    let tau = (-1.5 * j as f64).exp2();
    let mut ts: Vec<f64> = (0..=128).map(|i| horizon * i as f64 / 128.0).collect();
    let (g0, g1) = (0.02f64.ln(), (horizon / tau).ln());
    for i in 0..48 {
        let g = tau * (g0 + (g1 - g0) * i as f64 / 47.0).exp();
        ts.extend([t0 - g, t0 + g]);
    }
    ts.push(t0);
    ts.retain(|t| (0.0..=horizon).contains(t));
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

impl DyadicEvolution for FlatModel {
    fn grid(&self, j: u32) -> Result<PeriodicGrid> {
        let g = PeriodicGrid::new(1, self.extent, self.points)?;
        if g.nyquist() < (j as f64 + 1.0).exp2() {
            return Err(Error::InvalidInput(format!("{} points on length {} cannot carry block {j}", self.points, self.extent)));
        }
        Ok(g)
    }

    fn horizon(&self) -> f64 {
        self.horizon
    }

    fn sup_profile(&self, j: u32, u0: &SpectralField, focus: f64) -> Result<Vec<(f64, f64)>> {
        let grid = u0.grid();
        let disp: Vec<f64> = (0..grid.len()).map(|i| grid.frequency(i)[0].abs().powf(1.5)).collect();
        focal_times(j, focus, self.horizon)
            .into_par_iter()
            .map(|t| {
                let spec = u0.spectrum().iter().zip(&disp).map(|(&c, &w)| c * C64::from_polar(1.0, -t * w)).collect();
                Ok((t, SpectralField::from_spectrum(grid, spec)?.max_abs()))
            })
            .collect()
    }
}

/// `u_t + iΓ(x, D)u = 0` block by block, through the semiclassical reference propagator
/// with `V = 0` on `σ ∈ [0, h^{−1/2}T]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasilinearModel {
    pub surface: SurfacePreset,
    pub points: usize,
    pub horizon: f64,
    /// Output samples of the reference run over the whole horizon.
    pub samples: usize,
}

impl QuasilinearModel {
    fn symbols(&self, j: u32) -> Result<PulledBackSymbols> {
        PulledBackSymbols::from_presets(&SemiclassicalParams::standard(j)?, &self.surface, &VelocityPreset::Zero)
    }
}

impl DyadicEvolution for QuasilinearModel {
    fn grid(&self, j: u32) -> Result<PeriodicGrid> {
        let g = PeriodicGrid::new(1, 2.0 * std::f64::consts::PI, self.points)?;
        if g.nyquist() < (j as f64 + 1.0).exp2() {
            return Err(Error::InvalidInput(format!("{} points cannot carry block {j}", self.points)));
        }
        Ok(g)
    }

    fn horizon(&self) -> f64 {
        self.horizon
    }

    fn sup_profile(&self, j: u32, u0: &SpectralField, _focus: f64) -> Result<Vec<(f64, f64)>> {
        let ps = self.symbols(j)?;
        let h = ps.frame().params().h();
        // t = h^{1/2}σ
        let run = reference_propagate(&Generator::new(&ps, Quantization::Left)?, u0, self.horizon / h.sqrt(), self.samples, Direction::Forward)?;
        Ok(run.sigmas.iter().zip(&run.fields).map(|(s, f)| (s * h.sqrt(), f.max_abs())).collect())
    }
}

/// Ensemble member: `Δ_j`-shaped spectrum with seeded amplitude jitter, phased so that
/// the flat flow focuses it at a seeded `(x₀, t₀)`, `x₀` on the grid.
pub fn focusing_datum(grid: &PeriodicGrid, j: u32, horizon: f64, seed: u64, member: usize) -> Result<(SpectralField, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((j as u64) << 32) ^ member as u64);
    let t0 = horizon * rng.gen_range(0.3..0.7);
    let x0 = grid.point(rng.gen_range(0..grid.len()))[0];
    let shape = lp_block(&SpectralField::from_spectrum(grid, vec![C64::new(1.0, 0.0); grid.len()])?, j);
    let spec: Vec<C64> = shape
        .spectrum()
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let k = grid.frequency(i)[0];
            let jitter = 1.0 + 0.25 * rng.gen_range(-1.0..1.0);
            w * jitter * C64::from_polar(1.0, -k * x0 + t0 * k.abs().powf(1.5))
        })
        .collect();
    Ok((SpectralField::from_spectrum(grid, spec)?, t0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrichartzConfig {
    pub p: f64,
    pub mu: f64,
    pub s: f64,
    pub js: Vec<u32>,
    pub ensemble: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrichartzReport {
    pub p: f64,
    /// Space exponent, `∞` in one dimension at `p = 4`.
    pub q: f64,
    pub mu: f64,
    pub s: f64,
    pub js: Vec<u32>,
    /// Ensemble maximum of `‖u‖_{L^p L^∞} / ‖u₀‖_{L²}` per `j`.
    pub raw: Vec<f64>,
    /// `2^{j(s − 1/2 + μ)} raw / 2^{js}`.
    pub quotients: Vec<f64>,
    pub ensemble: usize,
    pub seed: u64,
}

impl StrichartzReport {
    pub fn reweighted(&self, mu: f64) -> Self {
        let quotients = self.js.iter().zip(&self.raw).map(|(&j, r)| r * (j as f64 * (mu - 0.5)).exp2()).collect();
        Self { mu, quotients, ..self.clone() }
    }

    /// `max / min` of the weighted quotients.
    pub fn spread(&self) -> f64 {
        let max = self.quotients.iter().copied().fold(f64::MIN, f64::max);
        let min = self.quotients.iter().copied().fold(f64::MAX, f64::min);
        max / min
    }

    /// Fitted `log₂`-slope of the weighted quotients in `j`.
    pub fn slope(&self) -> Result<f64> {
        let x: Vec<f64> = self.js.iter().map(|&j| j as f64).collect();
        let y: Vec<f64> = self.quotients.iter().map(|q| q.log2()).collect();
        Ok(linear_fit(&x, &y, 3)?.slope)
    }
}

/// `(∫|f|^p dt)^{1/p}` by the trapezoid rule on the samples.
pub fn lp_in_time(samples: &[(f64, f64)], p: f64) -> f64 {
    let (t, f): (Vec<f64>, Vec<f64>) = samples.iter().map(|&(t, v)| (t, v.abs().powf(p))).unzip();
    trapezoid(&t, &f).powf(1.0 / p)
}

pub fn strichartz_quotient(model: &dyn DyadicEvolution, config: &StrichartzConfig) -> Result<StrichartzReport> {
    if config.ensemble < 8 {
        return Err(Error::InvalidInput(format!("ensemble of {} is below the minimum of 8", config.ensemble)));
    }
    if !(config.p >= 2.0) {
        return Err(Error::InvalidInput(format!("time exponent p = {} below 2", config.p)));
    }
    let mut raw = Vec::with_capacity(config.js.len());
    for &j in &config.js {
        let grid = model.grid(j)?;
        let mut worst: f64 = 0.0;
        for member in 0..config.ensemble {
            let (u0, t0) = focusing_datum(&grid, j, model.horizon(), config.seed, member)?;
            let prof = model.sup_profile(j, &u0, t0)?;
            worst = worst.max(lp_in_time(&prof, config.p) / u0.l2_norm());
        }
        raw.push(worst);
    }
    let report = StrichartzReport {
        p: config.p,
        q: 2.0 * config.p / (config.p - 4.0).max(0.0),
        mu: config.mu,
        s: config.s,
        js: config.js.clone(),
        quotients: vec![],
        raw,
        ensemble: config.ensemble,
        seed: config.seed,
    };
    Ok(report.reweighted(config.mu))
}
