//! Reference solutions of `h∂_σv + iPv = 0` and their comparison with the parametrix.

use crate::error::{Error, Result};
use crate::parametrix::{apply_parametrix, initial_error, residual, AmplitudeOrder, Bicharacteristics};
use crate::semiclassical::{radial_profile, PulledBackSymbols};
use crate::spectral::{apply_real_multiplier, SpectralField, C64};

/// Which operator drives the reference evolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantization {
    /// `P = Γ_h(x, hD)`, pulled back through the frame.
    Left,
    /// `½(P + P*)`: real principal symbol, unitary flow.
    Symmetric,
    /// `P* = Σ_± m_±(hD) c_±(x)`.
    Adjoint,
}

/// `v ↦ Pv` in one of the three forms.
#[derive(Clone, Copy)]
pub struct Generator<'a> {
    symbols: &'a PulledBackSymbols,
    form: Quantization,
}

impl<'a> Generator<'a> {
    pub fn new(symbols: &'a PulledBackSymbols, form: Quantization) -> Result<Self> {
        if form != Quantization::Left && !symbols.frame().is_identity() {
            return Err(Error::InvalidInput(format!("{form:?} generator needs V = 0 (identity frame)")));
        }
        Ok(Self { symbols, form })
    }

    pub fn symbols(&self) -> &'a PulledBackSymbols {
        self.symbols
    }

    fn h(&self) -> f64 {
        self.symbols.frame().params().h()
    }

    fn adjoint(&self, v: &SpectralField) -> Result<SpectralField> {
        let grid = v.grid();
        let (h, m) = (self.h(), self.symbols.gamma().order());
        let mut out = SpectralField::zeros(grid);
        for sign in [1.0, -1.0] {
            let c = self.symbols.gamma().coefficient(sign);
            let cv = v.mul(&SpectralField::from_real_fn(grid, |x| c.value(x[0])));
            out = out.add(&apply_real_multiplier(&cv, |xi| if xi[0] * sign > 0.0 { radial_profile(m, h * xi[0])[0] } else { 0.0 })?);
        }
        Ok(out)
    }

    pub fn apply(&self, sigma: f64, v: &SpectralField) -> Result<SpectralField> {
        match self.form {
            Quantization::Left => self.symbols.apply(sigma, v),
            Quantization::Adjoint => self.adjoint(v),
            Quantization::Symmetric => {
                Ok(self.symbols.gamma_x(v)?.add(&self.adjoint(v)?).scale(C64::new(0.5, 0.0)))
            }
        }
    }

    /// `c̄`, the mean of `(c₊ + c₋)/2`, and `sup_x |c_± − c̄|` on `n` samples.
    fn frozen_coefficient(&self, n: usize) -> (f64, f64) {
        let g = self.symbols.gamma();
        let xs: Vec<f64> = (0..n).map(|i| 2.0 * std::f64::consts::PI * i as f64 / n as f64).collect();
        let vals: Vec<[f64; 2]> = xs.iter().map(|&x| [g.coefficient(1.0).value(x), g.coefficient(-1.0).value(x)]).collect();
        let mean = vals.iter().map(|v| 0.5 * (v[0] + v[1])).sum::<f64>() / n as f64;
        let dev = vals.iter().flat_map(|v| v.iter().map(|c| (c - mean).abs())).fold(0.0, f64::max);
        (mean, dev)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `h∂_σv = −iP(σ)v` from `σ = 0`.
    Forward,
    /// `h∂_sw = +iP(σ_end − s)w`: the adjoint evolution, run backwards from `σ_end`.
    Reversed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropagatorMethod {
    Reference,
    FlatExact,
    Parametrix,
}

#[derive(Clone, Debug)]
pub struct PropagatorRun {
    pub method: PropagatorMethod,
    pub sigmas: Vec<f64>,
    pub fields: Vec<SpectralField>,
    /// `‖v(σ)‖_{L²}` at each sample.
    pub norms: Vec<f64>,
    /// Time steps used (0 for closed-form runs).
    pub steps: usize,
}

impl PropagatorRun {
    fn from_fields(method: PropagatorMethod, sigmas: Vec<f64>, fields: Vec<SpectralField>, steps: usize) -> Self {
        let norms = fields.iter().map(|f| f.l2_norm()).collect();
        Self { method, sigmas, fields, norms, steps }
    }

    /// `max_σ |‖v(σ)‖ − ‖v(0)‖| / ‖v(0)‖`.
    pub fn norm_drift(&self) -> f64 {
        let n0 = self.norms[0];
        self.norms.iter().map(|n| (n - n0).abs() / n0).fold(0.0, f64::max)
    }

    pub fn last(&self) -> &SpectralField {
        self.fields.last().expect("runs hold at least the initial field")
    }
}

fn check_band(v: &SpectralField, h: f64) -> Result<()> {
    let grid = v.grid();
    let (mut out, mut tot) = (0.0, 0.0);
    for (i, c) in v.spectrum().iter().enumerate() {
        let e = c.norm_sqr();
        tot += e;
        if !(0.25..=4.0).contains(&(h * grid.frequency(i)[0]).abs()) {
            out += e;
        }
    }
    if out > 1e-24 * tot {
        return Err(Error::InvalidInput(format!("initial data carries {:.1e} of its energy outside 1/4 ≤ |hξ| ≤ 4", out / tot)));
    }
    Ok(())
}

/// Integrating-factor (Lawson) RK4 over `n` steps, the frozen part `c̄ m(hD)` exact.
fn lawson(
    gen: &Generator,
    v0: &SpectralField,
    window: f64,
    n: usize,
    samples: usize,
    direction: Direction,
    cbar: f64,
) -> Result<Vec<SpectralField>> {
    let h = gen.h();
    let m = gen.symbols.gamma().order();
    let sign = match direction {
        Direction::Forward => -1.0,
        Direction::Reversed => 1.0,
    };
    let dt = window / n as f64;
    let frozen = |xi: f64| cbar * radial_profile(m, h * xi)[0];
    let expo = |u: &SpectralField, tau: f64| -> Result<SpectralField> {
        let g = u.grid();
        let spec: Vec<C64> = u
            .spectrum()
            .iter()
            .enumerate()
            .map(|(i, &c)| c * C64::from_polar(1.0, sign * tau * frozen(g.frequency(i)[0]) / h))
            .collect();
        SpectralField::from_spectrum(g, spec)
    };
    // N(u) = (sign·i/h)(P − c̄ m(hD))u
    let nonlinear = |s: f64, u: &SpectralField| -> Result<SpectralField> {
        let at = match direction {
            Direction::Forward => s,
            Direction::Reversed => window - s,
        };
        let pu = gen.apply(at, u)?;
        let fu = apply_real_multiplier(u, |xi| frozen(xi[0]))?;
        Ok(pu.sub(&fu).scale(C64::new(0.0, sign / h)))
    };
    let n0 = v0.l2_norm();
    let every = n / samples;
    let mut out = Vec::with_capacity(samples + 1);
    out.push(v0.clone());
    let mut u = v0.clone();
    for k in 0..n {
        let s = k as f64 * dt;
        let half = |w: &SpectralField| expo(w, dt / 2.0);
        let eu_half = half(&u)?;
        let k1 = nonlinear(s, &u)?;
        let k2 = nonlinear(s + dt / 2.0, &half(&u.add(&k1.scale(C64::new(dt / 2.0, 0.0))))?)?;
        let k3 = nonlinear(s + dt / 2.0, &eu_half.add(&k2.scale(C64::new(dt / 2.0, 0.0))))?;
        let k4 = nonlinear(s + dt, &expo(&u, dt)?.add(&half(&k3)?.scale(C64::new(dt, 0.0))))?;
        let mid = half(&k2.add(&k3))?.scale(C64::new(2.0, 0.0));
        let incr = expo(&k1, dt)?.add(&mid).add(&k4).scale(C64::new(dt / 6.0, 0.0));
        u = expo(&u, dt)?.add(&incr);
        let nu = u.l2_norm();
        if !u.is_finite() || nu > 1.1 * n0 {
            return Err(Error::Abort(format!(
                "reference evolution unstable at σ = {:.3e}: norm ratio {:.3}, step {:.3e}, Δσ·sup|p − p̄|/h = {:.3}",
                s + dt,
                nu / n0,
                dt,
                dt * gen.frozen_coefficient(256).1 * 8.0 / h
            )));
        }
        if (k + 1) % every == 0 {
            out.push(u.clone());
        }
    }
    Ok(out)
}

/// RK4 solution on `[0, window]` sampled at `samples` equispaced points after `σ = 0`,
/// doubling the step count until the final state of successive runs agrees to `1e−8` relative.
pub fn reference_propagate(
    gen: &Generator,
    v0: &SpectralField,
    window: f64,
    samples: usize,
    direction: Direction,
) -> Result<PropagatorRun> {
    let h = gen.h();
    check_band(v0, h)?;
    if samples == 0 || !(window > 0.0) {
        return Err(Error::InvalidInput(format!("need a positive window and at least one sample, got {window}, {samples}")));
    }
    let (cbar, dev) = gen.frozen_coefficient(256);
    // the remainder rotates by at most Δσ·dev·8/h per step
    let guess = (window * dev * 8.0 / (0.5 * h)).ceil().max(8.0) as usize;
    let mut n = guess.div_ceil(samples) * samples;
    let mut coarse = lawson(gen, v0, window, n, samples, direction, cbar)?;
    loop {
        let fine = lawson(gen, v0, window, 2 * n, samples, direction, cbar)?;
        n *= 2;
        let gap = fine.last().expect("nonempty").sub(coarse.last().expect("nonempty")).l2_norm() / v0.l2_norm();
        if gap <= 1e-8 {
            let sigmas = (0..=samples).map(|i| window * i as f64 / samples as f64).collect();
            return Ok(PropagatorRun::from_fields(PropagatorMethod::Reference, sigmas, fine, n));
        }
        if n > 1 << 16 {
            return Err(Error::Abort(format!("reference evolution unresolved at {n} steps (gap {gap:.2e})")));
        }
        coarse = fine;
    }
}

/// `e^{−iσ|hD|^m φ₁(hD)/h} v` at the given σ.
pub fn flat_exact(v0: &SpectralField, h: f64, order: f64, sigmas: &[f64]) -> Result<PropagatorRun> {
    let grid = v0.grid();
    let fields = sigmas
        .iter()
        .map(|&s| {
            let spec = v0
                .spectrum()
                .iter()
                .enumerate()
                .map(|(i, &c)| c * C64::from_polar(1.0, -s * radial_profile(order, h * grid.frequency(i)[0])[0] / h))
                .collect();
            SpectralField::from_spectrum(grid, spec)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PropagatorRun::from_fields(PropagatorMethod::FlatExact, sigmas.to_vec(), fields, 0))
}

/// `𝒦v₀` at the given σ.
pub fn parametrix_run(b: &Bicharacteristics, v0: &SpectralField, sigmas: &[f64]) -> Result<PropagatorRun> {
    let order = AmplitudeOrder::new(1)?;
    let fields = sigmas.iter().map(|&s| apply_parametrix(b, v0, s, order)).collect::<Result<Vec<_>>>()?;
    Ok(PropagatorRun::from_fields(PropagatorMethod::Parametrix, sigmas.to_vec(), fields, 0))
}

/// `|⟨𝒯v, w⟩ − ⟨v, 𝒯*w⟩| / (‖v‖‖w‖)`, with `𝒯*` the reversed evolution of `P*`.
pub fn adjoint_defect(symbols: &PulledBackSymbols, v: &SpectralField, w: &SpectralField, window: f64) -> Result<f64> {
    let fwd = reference_propagate(&Generator::new(symbols, Quantization::Left)?, v, window, 1, Direction::Forward)?;
    let back = reference_propagate(&Generator::new(symbols, Quantization::Adjoint)?, w, window, 1, Direction::Reversed)?;
    let lhs = fwd.last().inner(w);
    let rhs = v.inner(back.last());
    Ok((lhs - rhs).norm() / (v.l2_norm() * w.l2_norm()))
}

/// `‖𝒯v₀ − 𝒦v₀‖ / ‖v₀‖` against the Duhamel bound `‖r_h‖ + (σ/h) sup‖R_h‖` (both relative).
#[derive(Clone, Debug, PartialEq)]
pub struct DuhamelRecord {
    pub j: u32,
    pub sigmas: Vec<f64>,
    pub errors: Vec<f64>,
    pub bounds: Vec<f64>,
    pub initial_error: f64,
    pub residual_sup: f64,
}

impl DuhamelRecord {
    pub fn max_error(&self) -> f64 {
        self.errors.iter().copied().fold(0.0, f64::max)
    }

    /// `max_σ error / bound`.
    pub fn worst_ratio(&self) -> f64 {
        self.errors.iter().zip(&self.bounds).map(|(e, b)| e / b).fold(0.0, f64::max)
    }
}

/// Reference and parametrix solutions at `count` stored nodes across the window.
pub fn duhamel_compare(b: &Bicharacteristics, v0: &SpectralField, count: usize) -> Result<DuhamelRecord> {
    let symbols = b.symbols();
    let params = symbols.frame().params();
    let h = params.h();
    let order = AmplitudeOrder::new(1)?;
    let rec = residual(b, v0, order, count)?;
    let r0 = initial_error(v0, h)?;
    let sigmas: Vec<f64> = rec.samples.iter().map(|s| s.sigma).collect();
    let reference = reference_propagate(&Generator::new(symbols, Quantization::Left)?, v0, b.window(), count, Direction::Forward)?;
    let norm = v0.l2_norm();
    let mut errors = Vec::with_capacity(count);
    for (i, &s) in sigmas.iter().enumerate() {
        let k = apply_parametrix(b, v0, s, order)?;
        errors.push(reference.fields[i + 1].sub(&k).l2_norm() / norm);
    }
    let bounds = sigmas.iter().map(|s| r0 + s / h * rec.sup).collect();
    Ok(DuhamelRecord { j: params.j(), sigmas, errors, bounds, initial_error: r0, residual_sup: rec.sup })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::parametrix::{banded_data, solve_characteristics, CharacteristicsConfig};
    use crate::semiclassical::{build_gamma_h, integrate_straightening, SemiclassicalParams, VelocityPreset};
    use crate::spectral::PeriodicGrid;
    use crate::ww_symbols::{gamma_omega, SurfacePreset};
    use std::sync::Arc;

    pub(crate) fn symbols(j: u32, surface: &str) -> Arc<PulledBackSymbols> {
        let p = SemiclassicalParams::standard(j).unwrap();
        Arc::new(PulledBackSymbols::from_presets(&p, &surface.parse().unwrap(), &VelocityPreset::Zero).unwrap())
    }

    fn data(ps: &PulledBackSymbols, seed: u64) -> SpectralField {
        let p = ps.frame().params();
        banded_data(&p.lattice(), p.h(), seed).unwrap()
    }

    #[test]
    fn flat_reference_matches_multiplier() {
        let ps = symbols(6, "flat");
        let v = data(&ps, 1);
        let h = ps.frame().params().h();
        let w = ps.frame().params().window();
        let run = reference_propagate(&Generator::new(&ps, Quantization::Left).unwrap(), &v, w, 4, Direction::Forward).unwrap();
        let exact = flat_exact(&v, h, 1.5, &run.sigmas).unwrap();
        for (a, b) in run.fields.iter().zip(&exact.fields) {
            assert!(a.sub(b).l2_norm() <= 1e-8 * v.l2_norm());
        }
    }

    #[test]
    fn symmetric_evolution_conserves_l2() {
        let ps = symbols(6, "bump(0.2)");
        let v = data(&ps, 2);
        let w = ps.frame().params().window();
        let run = reference_propagate(&Generator::new(&ps, Quantization::Symmetric).unwrap(), &v, w, 8, Direction::Forward).unwrap();
        assert!(run.norm_drift() <= 1e-6, "{}", run.norm_drift());
    }

    #[test]
    fn adjoint_consistency() {
        let ps = symbols(6, "bump(0.2)");
        let w = ps.frame().params().window();
        for seed in [3, 4] {
            let d = adjoint_defect(&ps, &data(&ps, seed), &data(&ps, seed + 10), w).unwrap();
            assert!(d <= 1e-8, "{d}");
        }
    }

    #[test]
    fn symmetric_form_needs_identity_frame() {
        let p = SemiclassicalParams::standard(5).unwrap();
        let g = PeriodicGrid::new(1, 2.0 * std::f64::consts::PI, 256).unwrap();
        let (gamma, _) = gamma_omega(&"flat".parse::<SurfacePreset>().unwrap().build(&g).unwrap());
        let v = "sine(1)".parse::<VelocityPreset>().unwrap().build(&g).unwrap();
        let (gh, vh) = build_gamma_h(&gamma, &v, &p, &g).unwrap();
        let ps = PulledBackSymbols::new(gh, integrate_straightening(&vh, &p).unwrap());
        assert!(Generator::new(&ps, Quantization::Symmetric).is_err());
        assert!(Generator::new(&ps, Quantization::Left).is_ok());
    }

    #[test]
    fn out_of_band_data_rejected() {
        let ps = symbols(5, "flat");
        let grid = ps.frame().params().lattice();
        let v = SpectralField::mode(&grid, [1, 0], C64::new(1.0, 0.0));
        let gen = Generator::new(&ps, Quantization::Left).unwrap();
        assert!(reference_propagate(&gen, &v, 0.1, 1, Direction::Forward).is_err());
    }

    #[test]
    fn flat_duhamel_is_exact() {
        let ps = symbols(6, "flat");
        let b = solve_characteristics(ps.clone(), CharacteristicsConfig::default()).unwrap();
        let rec = duhamel_compare(&b, &data(&ps, 5), 4).unwrap();
        assert!(rec.max_error() <= 1e-6, "{:?}", rec.errors);
    }

    #[test]
    fn bump_duhamel_within_twice_the_bound() {
        let ps = symbols(6, "bump(0.2)");
        let b = solve_characteristics(ps.clone(), CharacteristicsConfig::default()).unwrap();
        let rec = duhamel_compare(&b, &data(&ps, 6), 4).unwrap();
        assert!(rec.worst_ratio() <= 2.0, "{rec:?}");
    }
}
