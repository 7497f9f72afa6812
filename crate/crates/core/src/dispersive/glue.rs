//! Gluing short-window estimates into one on `[0, T]`.
//!
//! Windows `I_{j,m} = [m, m + 2]·2^{−ςj}` carry cutoffs `χ_{j,m}(t) = χ(t/2^{−ςj} − m)`
//! with `χ = 1` on `[1/2, 3/2]` and `supp χ ⊂ [0, 2]`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::band;
use crate::util::quad::trapezoid;

pub fn window_cutoff(t: f64) -> f64 {
    band(t, 0.0, 0.5, 1.5, 2.0)
}

/// `⌊2^{ςj}T⌋ − 1`, the number of windows `I_{j,m}` inside `[0, T]`.
pub fn window_count(j: u32, varsigma: f64, horizon: f64) -> usize {
    ((varsigma * j as f64).exp2() * horizon).floor().max(1.0) as usize - 1
}

/// `min Σ_m χ_{j,m}(t)` over `samples` points of `[2^{−ςj}, T′]`, where
/// `T′ = min(T − 2^{−ςj}, (M + 1/2)2^{−ςj})` and `M` is the window count. The two
/// right ends agree when `2^{ςj}T` is an integer; otherwise the plateau of the last
/// window stops short of `T − 2^{−ςj}`.
pub fn partition_coverage(j: u32, varsigma: f64, horizon: f64, samples: usize) -> f64 {
    let w = (-varsigma * j as f64).exp2();
    let m = window_count(j, varsigma, horizon);
    let end = (horizon - w).min((m as f64 + 0.5) * w);
    (0..=samples)
        .map(|i| {
            let t = w + (end - w) * i as f64 / samples as f64;
            (0..m).map(|k| window_cutoff(t / w - k as f64)).sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GlueRecord {
    pub j: u32,
    pub windows: usize,
    /// `(Σ_m ‖χ_{j,m} f‖^p_{L^p(I_{j,m})})^{1/p}`.
    pub glued: f64,
    /// `‖f‖_{L^p(0,T)}` on the same samples.
    pub direct: f64,
    /// `glued / direct`.
    pub overhead: f64,
    /// `max_m ‖χ_{j,m} f‖_{L^p}`, the largest single-window contribution.
    pub largest_window: f64,
}

/// Glues the time profile `f(t) = ‖u(t)‖_{L^∞}` over `[0, T]`.
pub fn glue_intervals(
    f: impl Fn(f64) -> Result<f64> + Sync,
    j: u32,
    varsigma: f64,
    horizon: f64,
    p: f64,
    samples_per_window: usize,
) -> Result<GlueRecord> {
    if !(horizon > 0.0 && horizon <= 1.0) {
        return Err(Error::InvalidInput(format!("horizon T = {horizon} outside (0, 1]")));
    }
    let windows = window_count(j, varsigma, horizon);
    if windows < 2 {
        return Err(Error::Degenerate(format!("{windows} window(s) at j = {j}: run the single-window estimate")));
    }
    let w = (-varsigma * j as f64).exp2();
    let n = ((horizon / w).ceil() as usize * samples_per_window).max(2);
    let ts: Vec<f64> = (0..=n).map(|i| horizon * i as f64 / n as f64).collect();
    let fs = ts.par_iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
    let powered: Vec<f64> = fs.iter().map(|v| v.abs().powf(p)).collect();
    let direct = trapezoid(&ts, &powered).powf(1.0 / p);
    let mut total = 0.0;
    let mut largest: f64 = 0.0;
    for m in 0..windows {
        let weighted: Vec<f64> = ts.iter().zip(&powered).map(|(&t, &g)| window_cutoff(t / w - m as f64).powf(p) * g).collect();
        let piece = trapezoid(&ts, &weighted);
        largest = largest.max(piece.powf(1.0 / p));
        total += piece;
    }
    let glued = total.powf(1.0 / p);
    Ok(GlueRecord { j, windows, glued, direct, overhead: glued / direct, largest_window: largest })
}
