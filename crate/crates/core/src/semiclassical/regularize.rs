use super::params::SemiclassicalParams;
use crate::error::{Error, Result};
use crate::paradiff::{apply_pseudodiff, smooth_symbol, SymbolField};
use crate::spectral::{annulus_radial, apply_real_multiplier, low_pass, lp_block, norm, PeriodicGrid, SpectralField, C64};
use crate::util::{Jet, TrigPoly};

/// `∂_t + S_{(j−3)δ}(V)·∇ + i S_{(j−3)δ}(γ)(x, D) φ₁(2^{−j}D)` on one dyadic block.
#[derive(Clone, Debug)]
pub struct LocalizedOperator {
    params: SemiclassicalParams,
    gamma: SymbolField,
    gamma_coarse: SymbolField,
    velocity: Vec<SpectralField>,
    velocity_coarse: Vec<SpectralField>,
}

/// Regularization remainders of one block, absolute and relative to the natural size of each term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularizationRecord {
    pub j: u32,
    /// `‖(S_{(j−3)δ}γ − S_{j−3}γ)(x,D)Δ_j u‖`.
    pub gamma_remainder: f64,
    /// `‖(S_{(j−3)δ}V − S_{j−3}V)·∇Δ_j u‖`.
    pub velocity_remainder: f64,
    /// `gamma_remainder / (2^{jm} ‖Δ_j u‖)`, `m` the order of `γ`.
    pub gamma_relative: f64,
    /// `velocity_remainder / (2^j ‖Δ_j u‖)`.
    pub velocity_relative: f64,
}

/// Smooths `γ` and `V` at level `(j−3)δ`; `velocity` holds one component per axis (empty for `V = 0`).
pub fn build_l_j(
    gamma: &SymbolField,
    velocity: &[SpectralField],
    params: &SemiclassicalParams,
    grid: &PeriodicGrid,
) -> Result<LocalizedOperator> {
    if !velocity.is_empty() && velocity.len() != grid.dim() {
        return Err(Error::InvalidInput(format!("velocity has {} components on a {}-d grid", velocity.len(), grid.dim())));
    }
    if velocity.iter().any(|v| v.grid() != grid) {
        return Err(Error::InvalidInput("velocity lives on a different grid".into()));
    }
    let level = params.smoothing_level();
    let coarse = params.j() as f64 - 3.0;
    Ok(LocalizedOperator {
        params: *params,
        gamma: smooth_symbol(gamma, level, grid)?,
        gamma_coarse: smooth_symbol(gamma, coarse, grid)?,
        velocity: velocity.iter().map(|v| low_pass(v, level)).collect(),
        velocity_coarse: velocity.iter().map(|v| low_pass(v, coarse)).collect(),
    })
}

fn transport(v: &[SpectralField], u: &SpectralField) -> SpectralField {
    let mut out = SpectralField::zeros(u.grid());
    for (axis, c) in v.iter().enumerate() {
        out = out.add(&c.mul(&u.derivative(axis)));
    }
    out
}

impl LocalizedOperator {
    pub fn params(&self) -> &SemiclassicalParams {
        &self.params
    }

    /// Smoothed `S_{(j−3)δ}γ`.
    pub fn gamma(&self) -> &SymbolField {
        &self.gamma
    }

    pub fn velocity(&self) -> &[SpectralField] {
        &self.velocity
    }

    /// The spatial part `S(V)·∇u + i S(γ)(x,D)φ₁(2^{−j}D)u`, so that `L_j u = ∂_t u + apply(u)`.
    pub fn apply(&self, u: &SpectralField) -> Result<SpectralField> {
        let scale = (-(self.params.j() as f64)).exp2();
        let cut = apply_real_multiplier(u, |xi| annulus_radial(norm(xi) * scale))?;
        let g = apply_pseudodiff(&self.gamma, &cut)?.scale(C64::new(0.0, 1.0));
        Ok(g.add(&transport(&self.velocity, u)))
    }

    pub fn remainders(&self, u: &SpectralField) -> Result<RegularizationRecord> {
        let j = self.params.j();
        let du = lp_block(u, j);
        let size = du.l2_norm();
        if size == 0.0 {
            return Err(Error::Degenerate(format!("probe has no energy in block {j}")));
        }
        let rg = apply_pseudodiff(&self.gamma, &du)?.sub(&apply_pseudodiff(&self.gamma_coarse, &du)?);
        let rv = transport(&self.velocity, &du).sub(&transport(&self.velocity_coarse, &du));
        let (gr, vr) = (rg.l2_norm(), rv.l2_norm());
        Ok(RegularizationRecord {
            j,
            gamma_remainder: gr,
            velocity_remainder: vr,
            gamma_relative: gr / ((j as f64 * self.gamma.order()).exp2() * size),
            velocity_relative: vr / ((j as f64).exp2() * size),
        })
    }
}

fn smooth_step_jet(t: Jet) -> Jet {
    if t.v <= 0.0 {
        return Jet::constant(0.0);
    }
    if t.v >= 1.0 {
        return Jet::constant(1.0);
    }
    let a = (-t.recip()).exp();
    let b = (-(-t + 1.0).recip()).exp();
    a / (a + b)
}

/// `φ₁` with its first two derivatives, from the closed form of the ramps.
fn annulus_jet(r: f64) -> [f64; 3] {
    let x = Jet::var(r, 0);
    let up = smooth_step_jet((x + (-0.25)) * 12.0);
    let down = -smooth_step_jet(x + (-3.0)) + 1.0;
    let f = up * down;
    [f.v, f.d[0], f.h[0][0]]
}

/// `|ξ|^m φ₁(ξ)` and its first two `ξ`-derivatives (`ξ` real, signed).
pub fn radial_profile(m: f64, xi: f64) -> [f64; 3] {
    let r = xi.abs();
    if !(0.25..4.0).contains(&r) {
        return [0.0; 3];
    }
    let p = [r.powf(m), m * r.powf(m - 1.0), m * (m - 1.0) * r.powf(m - 2.0)];
    let out = if (1.0 / 3.0..=3.0).contains(&r) {
        p
    } else {
        let c = annulus_jet(r);
        [p[0] * c[0], p[1] * c[0] + p[0] * c[1], p[2] * c[0] + 2.0 * p[1] * c[1] + p[0] * c[2]]
    };
    [out[0], xi.signum() * out[1], out[2]]
}

/// `Γ_h(x, ξ) = c_±(x)|ξ|^m φ₁(ξ)` in one dimension, where `c_±` are the smoothed values of the
/// homogeneous symbol on `ξ = ±1`. Every homogeneous symbol of one variable has this form.
#[derive(Clone, Debug)]
pub struct GammaH {
    order: f64,
    plus: TrigPoly,
    minus: TrigPoly,
}

impl GammaH {
    pub fn flat(order: f64) -> Self {
        let c = TrigPoly::constant(1.0, 2.0 * std::f64::consts::PI);
        Self { order, plus: c.clone(), minus: c }
    }

    pub fn from_coefficients(order: f64, plus: TrigPoly, minus: TrigPoly) -> Self {
        Self { order, plus, minus }
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn coefficient(&self, xi: f64) -> &TrigPoly {
        if xi >= 0.0 {
            &self.plus
        } else {
            &self.minus
        }
    }

    pub fn eval(&self, x: f64, xi: f64) -> f64 {
        let r = radial_profile(self.order, xi)[0];
        if r == 0.0 {
            return 0.0;
        }
        self.coefficient(xi).value(x) * r
    }

    /// `min |∂²_ξ Γ_h|` over the given points and frequencies.
    pub fn hessian_floor(&self, xs: &[f64], xis: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        for &x in xs {
            for &xi in xis {
                let d2 = self.coefficient(xi).value(x) * radial_profile(self.order, xi)[2];
                best = best.min(d2.abs());
            }
        }
        best
    }

    /// Symbol field view, for the generic quantization routines.
    pub fn to_symbol(&self) -> SymbolField {
        let g = self.clone();
        SymbolField::real(move |x, xi| g.eval(x[0], xi[0]), 0.0, f64::INFINITY)
    }
}

/// `Γ_h = S_{(j−3)δ}(γ)(x, ξ)φ₁(ξ)` and `V_h = S_{(j−3)δ}V`.
pub fn build_gamma_h(
    gamma: &SymbolField,
    velocity: &SpectralField,
    params: &SemiclassicalParams,
    grid: &PeriodicGrid,
) -> Result<(GammaH, TrigPoly)> {
    if grid.dim() != 1 {
        return Err(Error::InvalidInput("the semiclassical reduction is implemented for d = 1".into()));
    }
    if !gamma.is_homogeneous() {
        return Err(Error::InvalidInput("rescaling needs a homogeneous symbol".into()));
    }
    let level = params.smoothing_level();
    let coefficient = |s: f64| -> Result<TrigPoly> {
        let col = gamma.samples(grid, [s, 0.0]);
        if col.iter().any(|c| c.im.abs() > 1e-12 * (1.0 + c.re.abs())) {
            return Err(Error::InvalidInput("Γ_h needs a real principal symbol".into()));
        }
        let f = SpectralField::from_values(grid, col.iter().map(|c| C64::new(c.re, 0.0)).collect())?;
        Ok(TrigPoly::from_field(&low_pass(&f, level), 1e-15))
    };
    let gh = GammaH { order: gamma.order(), plus: coefficient(1.0)?, minus: coefficient(-1.0)? };
    let v = TrigPoly::from_field(&low_pass(velocity, level), 1e-15);
    Ok((gh, v))
}

/// Largest relative defect of `h^m S(γ)(x, ξ/h)φ₁(ξ) = Γ_h(x, ξ)` over the given samples.
pub fn rescaling_defect(gamma: &SymbolField, gh: &GammaH, params: &SemiclassicalParams, grid: &PeriodicGrid, samples: &[(usize, f64)]) -> Result<f64> {
    let smoothed = smooth_symbol(gamma, params.smoothing_level(), grid)?;
    let h = params.h();
    let m = gamma.order();
    let mut worst: f64 = 0.0;
    for &(ix, xi) in samples {
        let x = grid.point(ix);
        let lhs = h.powf(m) * smoothed.eval(x, [xi / h, 0.0]).re * annulus_radial(xi.abs());
        let rhs = gh.eval(x[0], xi);
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1e-300));
    }
    Ok(worst)
}

/// `w_h(σ, ·) = u_j(h^{1/2}σ, ·)`: the time samples are relabelled, the fields untouched.
pub fn rescale_to_semiclassical(times: &[f64], params: &SemiclassicalParams) -> Vec<f64> {
    let s = params.h().sqrt();
    times.iter().map(|t| t / s).collect()
}

pub fn rescale_to_physical(sigmas: &[f64], params: &SemiclassicalParams) -> Vec<f64> {
    let s = params.h().sqrt();
    sigmas.iter().map(|t| t * s).collect()
}
