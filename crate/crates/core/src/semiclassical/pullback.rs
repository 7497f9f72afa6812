//! `Γ_h` pulled back by the straightening flow.
//!
//! With `x = X(y)`, `x′ = X(y′)` and `ξ = M(y,y′)ζ`, the kernel of `Γ_h(x, hD_x)` becomes the
//! kernel of the two-point symbol `p̃(y, y′, ζ) = Γ_h(X(y), M(y,y′)ζ)J(y,y′)`; its diagonal is `p`.

use rayon::prelude::*;

use super::frame::{integrate_straightening, StraightenedFrame};
use super::params::{SemiclassicalParams, VelocityPreset};
use super::regularize::{build_gamma_h, radial_profile, GammaH};
use crate::error::{Error, Result};
use crate::spectral::{apply_real_multiplier, PeriodicGrid, SpectralField, C64};
use crate::util::fd::central_stencil;
use crate::util::interp::lagrange;
use crate::util::Jet;
use crate::ww_symbols::{gamma_omega, SurfacePreset};

/// `Γ_h` and the frame it is pulled back by.
#[derive(Clone, Debug)]
pub struct PulledBackSymbols {
    gamma: GammaH,
    frame: StraightenedFrame,
}

/// One entry of the symbol-class table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolClassRow {
    pub alpha: usize,
    pub beta: usize,
    /// `sup |D_y^α D_ζ^β p|` over the sample lattice.
    pub sup: f64,
    /// `1 + h^{−(α−1)δ}`.
    pub normalizer: f64,
    pub ratio: f64,
}

impl PulledBackSymbols {
    pub fn new(gamma: GammaH, frame: StraightenedFrame) -> Self {
        Self { gamma, frame }
    }

    /// The whole reduction for a surface and a frozen velocity: `γ` of the surface on a
    /// 256-point grid, `Γ_h` and `V_h` at `params`, then the straightening flow.
    pub fn from_presets(params: &SemiclassicalParams, surface: &SurfacePreset, velocity: &VelocityPreset) -> Result<Self> {
        let grid = PeriodicGrid::new(1, 2.0 * std::f64::consts::PI, 256)?;
        let (gamma, _) = gamma_omega(&surface.build(&grid)?);
        let (gh, vh) = build_gamma_h(&gamma, &velocity.build(&grid)?, params, &grid)?;
        Ok(Self::new(gh, integrate_straightening(&vh, params)?))
    }

    pub fn gamma(&self) -> &GammaH {
        &self.gamma
    }

    pub fn frame(&self) -> &StraightenedFrame {
        &self.frame
    }

    /// `p̃(σ, y, y′, ζ)`; zero once `M(y,y′)ζ` leaves the annulus.
    pub fn p_tilde(&self, sigma: f64, y: f64, yp: f64, zeta: f64) -> f64 {
        let xi = zeta * self.frame.m_two(sigma, y, yp);
        let f = radial_profile(self.gamma.order(), xi)[0];
        if f == 0.0 {
            return 0.0;
        }
        self.gamma.coefficient(xi).value(self.frame.x(sigma, y)) * f * self.frame.j_two(sigma, y, yp)
    }

    /// `p(σ, y, ζ) = Γ_h(X(y), ζ/X′(y))`.
    pub fn p(&self, sigma: f64, y: f64, zeta: f64) -> f64 {
        self.zeta_derivatives(sigma, y, zeta)[0]
    }

    /// `[p, ∂_ζ p, ∂²_ζ p]` in closed form.
    pub fn zeta_derivatives(&self, sigma: f64, y: f64, zeta: f64) -> [f64; 3] {
        let s = self.frame.state(sigma, y);
        let m = 1.0 / s[1];
        let f = radial_profile(self.gamma.order(), zeta * m);
        if f == [0.0; 3] {
            return f;
        }
        let c = self.gamma.coefficient(zeta).value(s[0]);
        [c * f[0], c * f[1] * m, c * f[2] * m * m]
    }

    /// Value, gradient and Hessian of `p` in `(y, ζ)`.
    pub fn p_jet(&self, sigma: f64, y: f64, zeta: f64) -> Jet {
        self.hamiltonian(sigma, y, zeta).0
    }

    /// `∂_ζ ∂_{y′} p̃` on the diagonal: `−½ c(X) X″ ζ F″(ζ/X′) / X′³` with `F = |·|^m φ₁`.
    pub fn cross_derivative(&self, sigma: f64, y: f64, zeta: f64) -> f64 {
        self.hamiltonian(sigma, y, zeta).1
    }

    /// [`Self::p_jet`] and [`Self::cross_derivative`] from one frame lookup.
    pub fn hamiltonian(&self, sigma: f64, y: f64, zeta: f64) -> (Jet, f64) {
        let s = self.frame.state(sigma, y);
        let x = Jet { v: s[0], d: [s[1], 0.0], h: [[s[2], 0.0], [0.0, 0.0]] };
        let dx = Jet { v: s[1], d: [s[2], 0.0], h: [[s[3], 0.0], [0.0, 0.0]] };
        let xi = Jet::var(zeta, 1) * dx.recip();
        let f = radial_profile(self.gamma.order(), xi.v);
        if f == [0.0; 3] {
            return (Jet::constant(0.0), 0.0);
        }
        let c = self.gamma.coefficient(zeta).eval(s[0]);
        let jet = x.compose(c[0], c[1], c[2]) * xi.compose(f[0], f[1], f[2]);
        let cross = if s[2] == 0.0 { 0.0 } else { -0.5 * c[0] * s[2] * zeta * f[2] / s[1].powi(3) };
        (jet, cross)
    }

    /// `min |det Hess_ζ p|` over the samples.
    pub fn hessian_floor(&self, sigmas: &[f64], ys: &[f64], zetas: &[f64]) -> f64 {
        sigmas
            .par_iter()
            .map(|&s| {
                let mut m = f64::INFINITY;
                for &y in ys {
                    for &z in zetas {
                        m = m.min(self.zeta_derivatives(s, y, z)[2].abs());
                    }
                }
                m
            })
            .reduce(|| f64::INFINITY, f64::min)
    }

    /// `P v = [Γ_h(x, hD)(v∘X^{−1})]∘X` on the lattice of `v`.
    pub fn apply(&self, sigma: f64, v: &SpectralField) -> Result<SpectralField> {
        let grid = v.grid();
        if grid.dim() != 1 {
            return Err(Error::InvalidInput("pulled-back operators are one-dimensional".into()));
        }
        let w = if self.frame.is_identity() {
            v.clone()
        } else {
            let xs: Vec<f64> = (0..grid.len()).map(|i| grid.point(i)[0]).collect();
            let ys = xs.par_iter().map(|&x| self.frame.inverse(sigma, x)).collect::<Result<Vec<_>>>()?;
            SpectralField::from_values(grid, ys.par_iter().map(|&y| v.eval_at([y, 0.0])).collect())?
        };
        let g = self.gamma_x(&w)?;
        if self.frame.is_identity() {
            return Ok(g);
        }
        let out: Vec<C64> = (0..grid.len()).into_par_iter().map(|i| g.eval_at([self.frame.x(sigma, grid.point(i)[0]), 0.0])).collect();
        SpectralField::from_values(grid, out)
    }

    /// `Γ_h(x, hD)w` on the lattice of `w`, split by the sign of the frequency.
    pub fn gamma_x(&self, w: &SpectralField) -> Result<SpectralField> {
        let grid = w.grid();
        let h = self.frame.params().h();
        let m = self.gamma.order();
        let part = |sign: f64| apply_real_multiplier(w, |xi| if xi[0] * sign > 0.0 { radial_profile(m, h * xi[0])[0] } else { 0.0 });
        let coeff = |sign: f64| {
            let c = self.gamma.coefficient(sign);
            SpectralField::from_real_fn(grid, |x| c.value(x[0]))
        };
        Ok(coeff(1.0).mul(&part(1.0)?).add(&coeff(-1.0).mul(&part(-1.0)?)))
    }

    /// `(2πh)^{−1} ∬ e^{i(y−y′)ζ/h} p̃(σ, y, y′, ζ) v(y′) dy′ dζ` at the lattice points of `v`.
    ///
    /// Substituting `ζ = H(y,y′)ξ` separates the `ζ`-integral into the transforms
    /// `K_±(s) = ∫_{±ξ>0} e^{isξ}|ξ|^m φ₁(ξ) dξ`, tabulated once; the `y′`-integral is a
    /// trapezoid sum on a 4× refined lattice, cut where `|K| ≤ 1e−6·max|K|`.
    pub fn quantize_two_point(&self, sigma: f64, v: &SpectralField) -> Result<SpectralField> {
        let grid = v.grid();
        if grid.dim() != 1 {
            return Err(Error::InvalidInput("pulled-back operators are one-dimensional".into()));
        }
        let h = self.frame.params().h();
        let table = KernelTable::new(self.gamma.order());
        let fine = refine(v, 4)?;
        let fg = fine.grid().clone();
        let dy = fg.spacing();
        let n = fg.points();
        let fine_y: Vec<f64> = (0..n).map(|i| fg.point(i)[0]).collect();
        let fine_state: Vec<_> = fine_y.par_iter().map(|&y| self.frame.state(sigma, y)).collect();
        let vals = fine.values();
        let reach = table.reach * h;
        let out: Vec<C64> = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let y = grid.point(i)[0];
                let xy = self.frame.x(sigma, y);
                let cp = self.gamma.coefficient(1.0).value(xy);
                let cm = self.gamma.coefficient(-1.0).value(xy);
                let centre = (y / dy).round() as i64;
                let mut acc = C64::new(0.0, 0.0);
                let mut k = 0i64;
                // walk outwards in both directions until x − x′ leaves the kernel's reach
                loop {
                    let mut live = false;
                    for off in if k == 0 { vec![0] } else { vec![k, -k] } {
                        let idx = centre + off;
                        let yp = idx as f64 * dy;
                        let st = &fine_state[idx.rem_euclid(n as i64) as usize];
                        let xp = st[0] + (yp - fine_y[idx.rem_euclid(n as i64) as usize]);
                        let gap = y - yp;
                        let hh = if gap.abs() < 1e-2 { self.frame.h_two(sigma, y, yp) } else { (xy - xp) / gap };
                        let s = gap * hh / h;
                        if s.abs() > table.reach {
                            continue;
                        }
                        live = true;
                        let (m, jac) = (1.0 / hh, st[1] / hh);
                        // dζ = H dξ; J·|H| = X′(y′)
                        let kp = table.eval(s);
                        let kern = (kp * cp + kp.conj() * cm) * (jac / m.abs());
                        acc += kern * vals[idx.rem_euclid(n as i64) as usize];
                    }
                    if !live && k as f64 * dy > reach {
                        break;
                    }
                    k += 1;
                }
                acc * (dy / (2.0 * std::f64::consts::PI * h))
            })
            .collect();
        SpectralField::from_values(grid, out)
    }
}

/// Zero-padded copy of `v` on a lattice `factor` times finer.
fn refine(v: &SpectralField, factor: usize) -> Result<SpectralField> {
    let g = v.grid();
    let fg = PeriodicGrid::new(1, g.extent(), g.points() * factor)?;
    let mut spec = vec![C64::new(0.0, 0.0); fg.len()];
    for (i, c) in v.spectrum().iter().enumerate() {
        let k = g.wavenumber(i);
        if 2 * k.unsigned_abs() as usize >= g.points() {
            continue;
        }
        spec[fg.index_of_wavenumber(k).expect("refined lattice holds every mode")] = *c;
    }
    SpectralField::from_spectrum(&fg, spec)
}

/// `K_+(s) = ∫₀^∞ e^{isξ} ξ^m φ₁(ξ) dξ` on a uniform table; `K_−` is its conjugate.
struct KernelTable {
    ds: f64,
    values_re: Vec<f64>,
    values_im: Vec<f64>,
    reach: f64,
}

impl KernelTable {
    fn new(m: f64) -> Self {
        let (a, b, nq) = (0.25, 4.0, 4000);
        let dxi = (b - a) / nq as f64;
        let nodes: Vec<(f64, f64)> = (0..=nq).map(|i| a + i as f64 * dxi).map(|x| (x, radial_profile(m, x)[0] * dxi)).collect();
        let ds = 0.02;
        let smax = 128.0;
        let count = (2.0 * smax / ds) as usize + 1;
        let vals: Vec<C64> = (0..count)
            .into_par_iter()
            .map(|i| {
                let s = -smax + i as f64 * ds;
                nodes.iter().map(|&(x, w)| C64::from_polar(w, s * x)).sum()
            })
            .collect();
        let peak = vals.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        // last |s| at which the kernel is still above 1e−6 of its peak
        let reach = vals
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm() > 1e-6 * peak)
            .map(|(i, _)| (-smax + i as f64 * ds).abs())
            .fold(0.0, f64::max)
            .min(smax - 1.0);
        Self { ds, values_re: vals.iter().map(|v| v.re).collect(), values_im: vals.iter().map(|v| v.im).collect(), reach }
    }

    fn eval(&self, s: f64) -> C64 {
        let x0 = -((self.values_re.len() - 1) as f64) * self.ds / 2.0;
        C64::new(lagrange(&self.values_re, x0, self.ds, s, 10), lagrange(&self.values_im, x0, self.ds, s, 10))
    }
}

/// `sup |D_y^α D_ζ^β p| / [1 + h^{−(α−1)δ}]` for `α ≤ α_max ≤ 3`, `β ≤ β_max ≤ 2`, sampled at
/// the given times over 64 points in `y` and `ζ ∈ 𝒞′`. `D_ζ` is closed form, `D_y` a centered stencil.
pub fn check_symbol_class(symbols: &PulledBackSymbols, sigmas: &[f64], alpha_max: usize, beta_max: usize) -> Result<Vec<SymbolClassRow>> {
    if alpha_max > 3 || beta_max > 2 {
        return Err(Error::InvalidInput(format!("class check limited to α ≤ 3, β ≤ 2; got ({alpha_max}, {beta_max})")));
    }
    let params = symbols.frame().params();
    let (h, delta) = (params.h(), params.delta());
    let ys: Vec<f64> = (0..64).map(|i| 2.0 * std::f64::consts::PI * (i as f64 + 0.25) / 64.0).collect();
    let zetas: Vec<f64> = (0..48).map(|i| (-2.0 + 4.0 * i as f64 / 47.0).exp2()).flat_map(|r| [r, -r]).collect();
    let e = 0.02;
    let mut rows = Vec::new();
    for alpha in 0..=alpha_max {
        let stencil = central_stencil(alpha, e);
        for beta in 0..=beta_max {
            let sup = sigmas
                .par_iter()
                .map(|&s| {
                    let mut m: f64 = 0.0;
                    for &y in &ys {
                        for &z in &zetas {
                            let f0 = symbols.zeta_derivatives(s, y, z)[beta];
                            // differences against the centre keep constant symbols exactly zero
                            let d: f64 = if alpha == 0 {
                                f0
                            } else {
                                stencil.iter().map(|&(o, w)| w * (symbols.zeta_derivatives(s, y + o * e, z)[beta] - f0)).sum()
                            };
                            m = m.max(d.abs());
                        }
                    }
                    m
                })
                .reduce(|| 0.0, f64::max);
            let normalizer = 1.0 + h.powf(-(alpha as f64 - 1.0) * delta);
            rows.push(SymbolClassRow { alpha, beta, sup, normalizer, ratio: sup / normalizer });
        }
    }
    Ok(rows)
}
