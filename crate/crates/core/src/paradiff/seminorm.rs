use std::collections::HashMap;

use rayon::prelude::*;

use super::symbol::SymbolField;
use crate::error::{Error, Result};
use crate::spectral::{holder_norm, PeriodicGrid, SpectralField, C64, Vec2};

/// `M^m_ρ(a)` together with the indices it was computed for.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemiNorm {
    pub value: f64,
    pub m: f64,
    pub rho: f64,
}

/// Frequencies at which the supremum over `|ξ| ≥ 1/2` is sampled.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XiSampling {
    /// Lattice step, also the finite-difference step in `ξ`.
    pub step: f64,
    pub max: f64,
}

impl XiSampling {
    pub fn for_grid(grid: &PeriodicGrid) -> Self {
        Self { step: grid.dual_spacing(), max: grid.nyquist() / 2.0 }
    }

    fn nodes(&self, dim: usize) -> Vec<Vec2> {
        let n = ((self.max - 0.5) / self.step).floor().max(0.0) as i64;
        if dim == 1 {
            (0..=n).flat_map(|i| {
                let r = 0.5 + i as f64 * self.step;
                [[r, 0.0], [-r, 0.0]]
            })
            .collect()
        } else {
            let k = (self.max / self.step).floor() as i64;
            let mut out = Vec::new();
            for a in -k..=k {
                for b in -k..=k {
                    let xi = [a as f64 * self.step, b as f64 * self.step];
                    let r = xi[0].hypot(xi[1]);
                    if (0.5..=self.max).contains(&r) {
                        out.push(xi);
                    }
                }
            }
            out
        }
    }
}

/// Second-order centered difference weights `(offset, weight·h^n)` for an order-`n` derivative.
fn central(n: usize) -> &'static [(i64, f64)] {
    match n {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        5 => &[(-3, -0.5), (-2, 2.0), (-1, -2.5), (1, 2.5), (2, -2.0), (3, 0.5)],
        _ => panic!("ξ-derivatives above fifth order are not supported"),
    }
}

fn multi_indices(dim: usize, max: usize) -> Vec<[usize; 2]> {
    let mut out = Vec::new();
    for n in 0..=max {
        for a0 in 0..=n {
            if dim == 1 && a0 != n {
                continue;
            }
            out.push([a0, n - a0]);
        }
    }
    out
}

/// `sup_{|α| ≤ d/2+1+ρ} sup_{|ξ| ≥ 1/2} (1+|ξ|)^{|α|−m} ‖∂_ξ^α a(·,ξ)‖_{W^{ρ,∞}}` on the default sampling.
pub fn semi_norm(a: &SymbolField, m: f64, rho: f64, grid: &PeriodicGrid) -> Result<SemiNorm> {
    semi_norm_with(a, m, rho, grid, XiSampling::for_grid(grid))
}

pub fn semi_norm_with(a: &SymbolField, m: f64, rho: f64, grid: &PeriodicGrid, sampling: XiSampling) -> Result<SemiNorm> {
    if !(rho >= 0.0) || !(sampling.step > 0.0) {
        return Err(Error::InvalidInput(format!("semi-norm needs ρ ≥ 0 and a positive ξ-step, got ρ = {rho}")));
    }
    let d = grid.dim();
    let amax = (d as f64 / 2.0 + 1.0 + rho).floor() as usize;
    if amax > 5 {
        return Err(Error::InvalidInput(format!("semi-norm would need ξ-derivatives of order {amax}")));
    }
    let alphas = multi_indices(d, amax);
    let h = sampling.step;
    let per_node = |xi: Vec2| -> f64 {
        let mut memo: HashMap<(i64, i64), Vec<C64>> = HashMap::new();
        let mut best: f64 = 0.0;
        let weight_base = 1.0 + xi[0].hypot(xi[1]);
        for al in &alphas {
            let n = al[0] + al[1];
            let mut acc = vec![C64::new(0.0, 0.0); grid.len()];
            for &(o0, w0) in central(al[0]) {
                for &(o1, w1) in central(al[1]) {
                    let s = memo
                        .entry((o0, o1))
                        .or_insert_with(|| a.samples(grid, [xi[0] + o0 as f64 * h, xi[1] + o1 as f64 * h]));
                    for (t, v) in acc.iter_mut().zip(s.iter()) {
                        *t += v * (w0 * w1);
                    }
                }
            }
            let scale = h.powi(-(n as i32));
            let f = SpectralField::from_values(grid, acc.into_iter().map(|v| v * scale).collect()).expect("grid-sized");
            let w = if rho == 0.0 { f.max_abs() } else { holder_norm(&f, rho).expect("ρ > 0") };
            best = best.max(weight_base.powf(n as f64 - m) * w);
        }
        best
    };
    let value = sampling.nodes(d).into_par_iter().map(per_node).reduce(|| 0.0, f64::max);
    Ok(SemiNorm { value, m, rho })
}
