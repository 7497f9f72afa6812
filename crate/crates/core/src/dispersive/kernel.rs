//! Decay of the composed kernel `W(σ, σ′, x, z)` of `𝒦(σ)𝒦(σ′)*`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::parametrix::{apply_parametrix, chi, AmplitudeOrder, Bicharacteristics};
use crate::spectral::{SpectralField, C64};
use crate::util::DecayFit;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelConfig {
    /// Separations start at `c_lower·h`; below it the kernel is in the `h^{−1}` regime.
    pub c_lower: f64,
    /// Geometric separations requested in `[c_lower·h, h^δ]`, snapped to stored nodes.
    pub separations: usize,
    /// Point probes `z`, equispaced on the torus.
    pub probes: usize,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self { c_lower: 8.0, separations: 8, probes: 4 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelDecay {
    pub j: u32,
    /// `|σ − σ′|` samples.
    pub separations: Vec<f64>,
    /// `sup_{x,z} |W|` per separation.
    pub sup_kernel: Vec<f64>,
    /// Fit of `log₂ sup|W|` against `log₂|σ − σ′|`.
    pub fit: DecayFit,
}

impl KernelDecay {
    pub fn slope(&self) -> f64 {
        self.fit.slope()
    }
}

/// `𝒦(0)*δ_z = χ(hD)δ_z`.
fn probe(b: &Bicharacteristics, index: usize) -> Result<SpectralField> {
    let params = b.symbols().frame().params();
    let (grid, h) = (params.lattice(), params.h());
    let mut values = vec![C64::new(0.0, 0.0); grid.len()];
    values[index] = C64::new(1.0 / grid.cell_volume(), 0.0);
    let delta = SpectralField::from_values(&grid, values)?;
    let spec = delta.spectrum().iter().enumerate().map(|(i, &c)| c * chi(h * grid.wavenumber(i) as f64)).collect();
    SpectralField::from_spectrum(&grid, spec)
}

fn sup_at_node(b: &Bicharacteristics, probes: &[SpectralField], k: usize) -> Result<f64> {
    let order = AmplitudeOrder::new(1)?;
    let sigma = k as f64 * b.dsigma();
    probes
        .iter()
        .map(|p| Ok(apply_parametrix(b, p, sigma, order)?.max_abs()))
        .try_fold(0.0f64, |m, v: Result<f64>| Ok(m.max(v?)))
}

fn probe_set(b: &Bicharacteristics, count: usize) -> Result<Vec<SpectralField>> {
    let n = b.symbols().frame().params().lattice().len();
    (0..count.max(1)).into_par_iter().map(|i| probe(b, i * n / count.max(1))).collect()
}

/// `sup |W(σ, 0, x, z)|` against `σ` over `[c_lower·h, h^δ]`, with `σ′ = 0`.
pub fn kernel_decay_fit(b: &Bicharacteristics, config: KernelConfig) -> Result<KernelDecay> {
    let params = b.symbols().frame().params();
    let h = params.h();
    let lo = (config.c_lower * h / b.dsigma()).ceil().max(1.0);
    let hi = b.steps() as f64;
    let mut nodes: Vec<usize> = if lo < hi && config.separations >= 2 {
        (0..config.separations)
            .map(|i| (lo * (hi / lo).powf(i as f64 / (config.separations - 1) as f64)).round() as usize)
            .collect()
    } else {
        vec![]
    };
    nodes.dedup();
    if nodes.len() < 4 {
        return Err(Error::Degenerate(format!(
            "{} usable separations in [{}h, h^δ] at j = {}, at least 4 required",
            nodes.len(),
            config.c_lower,
            params.j()
        )));
    }
    let probes = probe_set(b, config.probes)?;
    let sup_kernel = nodes.iter().map(|&k| sup_at_node(b, &probes, k)).collect::<Result<Vec<_>>>()?;
    let separations: Vec<f64> = nodes.iter().map(|&k| k as f64 * b.dsigma()).collect();
    let fit = DecayFit::new(separations.iter().map(|s| s.log2()).collect(), sup_kernel.clone(), 4)?;
    Ok(KernelDecay { j: params.j(), separations, sup_kernel, fit })
}

/// `h·sup|W|` at the stored separations below `h`: the trivial-regime constant.
pub fn short_separation_constant(b: &Bicharacteristics, probes: usize) -> Result<f64> {
    let h = b.symbols().frame().params().h();
    let top = ((h / b.dsigma()).floor() as usize).min(b.steps());
    let set = probe_set(b, probes)?;
    let mut out: f64 = 0.0;
    for k in 0..=top {
        out = out.max(h * sup_at_node(b, &set, k)?);
    }
    Ok(out)
}
