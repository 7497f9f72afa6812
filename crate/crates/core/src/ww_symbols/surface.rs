use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::{PeriodicGrid, SpectralField, C64, Vec2};

/// Surface elevation `η` at one time, with its first three spectral derivatives.
#[derive(Clone, Debug)]
pub struct SurfaceState {
    eta: SpectralField,
    t: f64,
    /// `∂_a η`, `∂_a∂_b η`, `∂_a∂_b∂_c η` as real samples; unused axes in 1-D are zero.
    grad: [Vec<f64>; 2],
    hess: [[Vec<f64>; 2]; 2],
    third: [[[Vec<f64>; 2]; 2]; 2],
    fields: Derivatives,
}

#[derive(Clone, Debug)]
struct Derivatives {
    grad: [SpectralField; 2],
    hess: [[SpectralField; 2]; 2],
}

/// `∇η` and `∇²η` at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geometry {
    pub g: [f64; 2],
    pub h: [[f64; 2]; 2],
}

fn real_parts(f: &SpectralField) -> Vec<f64> {
    f.values().iter().map(|v| v.re).collect()
}

impl SurfaceState {
    pub fn new(eta: SpectralField, t: f64) -> Result<Self> {
        let imag = eta.values().iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
        if imag > 1e-12 {
            return Err(Error::InvalidInput(format!("surface elevation must be real, max |Im η| = {imag:.3e}")));
        }
        if !eta.is_finite() {
            return Err(Error::InvalidInput("surface elevation has non-finite samples".into()));
        }
        let grid = eta.grid().clone();
        let zero = SpectralField::zeros(&grid);
        let d = |f: &SpectralField, axis: usize| if axis < grid.dim() { f.derivative(axis) } else { zero.clone() };
        let g = [d(&eta, 0), d(&eta, 1)];
        let h = [[d(&g[0], 0), d(&g[0], 1)], [d(&g[1], 0), d(&g[1], 1)]];
        let third = [
            [[real_parts(&d(&h[0][0], 0)), real_parts(&d(&h[0][0], 1))], [real_parts(&d(&h[0][1], 0)), real_parts(&d(&h[0][1], 1))]],
            [[real_parts(&d(&h[1][0], 0)), real_parts(&d(&h[1][0], 1))], [real_parts(&d(&h[1][1], 0)), real_parts(&d(&h[1][1], 1))]],
        ];
        Ok(Self {
            t,
            grad: [real_parts(&g[0]), real_parts(&g[1])],
            hess: [[real_parts(&h[0][0]), real_parts(&h[0][1])], [real_parts(&h[1][0]), real_parts(&h[1][1])]],
            third,
            fields: Derivatives { grad: g, hess: h },
            eta,
        })
    }

    pub fn from_fn(grid: &PeriodicGrid, f: impl Fn(Vec2) -> f64, t: f64) -> Result<Self> {
        Self::new(SpectralField::from_real_fn(grid, f), t)
    }

    pub fn flat(grid: &PeriodicGrid) -> Self {
        Self::new(SpectralField::zeros(grid), 0.0).expect("zero surface is valid")
    }

    pub fn eta(&self) -> &SpectralField {
        &self.eta
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.eta.grid()
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn grad_samples(&self) -> &[Vec<f64>; 2] {
        &self.grad
    }

    pub fn hess_samples(&self) -> &[[Vec<f64>; 2]; 2] {
        &self.hess
    }

    pub fn third_samples(&self) -> &[[[Vec<f64>; 2]; 2]; 2] {
        &self.third
    }

    /// `‖∇η‖_{L^∞}` over the grid.
    pub fn grad_sup(&self) -> f64 {
        (0..self.grid().len()).map(|i| self.grad[0][i].hypot(self.grad[1][i])).fold(0.0, f64::max)
    }

    /// `max(‖∇η‖_∞, ‖∇²η‖_∞)`, the `W^{1,∞}` size of `∇η`.
    pub fn grad_w1_sup(&self) -> f64 {
        let h = self.hess.iter().flatten().flat_map(|v| v.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
        self.grad_sup().max(h)
    }

    fn grid_index(&self, x: Vec2) -> Option<usize> {
        let g = self.grid();
        let dx = g.spacing();
        let n = g.points() as i64;
        let mut idx = [0usize; 2];
        for a in 0..g.dim() {
            let s = x[a] / dx;
            let r = s.round();
            if (s - r).abs() > 1e-9 {
                return None;
            }
            idx[a] = (r as i64).rem_euclid(n) as usize;
        }
        Some(if g.dim() == 1 { idx[0] } else { idx[0] * g.points() + idx[1] })
    }

    /// `∇η(x)`, `∇²η(x)`: table lookup on grid points, trigonometric interpolation elsewhere.
    pub fn geometry(&self, x: Vec2) -> Geometry {
        if let Some(i) = self.grid_index(x) {
            return Geometry {
                g: [self.grad[0][i], self.grad[1][i]],
                h: [[self.hess[0][0][i], self.hess[0][1][i]], [self.hess[1][0][i], self.hess[1][1][i]]],
            };
        }
        let f = &self.fields;
        Geometry {
            g: [f.grad[0].eval_at(x).re, f.grad[1].eval_at(x).re],
            h: [
                [f.hess[0][0].eval_at(x).re, f.hess[0][1].eval_at(x).re],
                [f.hess[1][0].eval_at(x).re, f.hess[1][1].eval_at(x).re],
            ],
        }
    }
}

/// Named surfaces usable from experiment configurations.
#[derive(Clone, Debug, PartialEq)]
pub enum SurfacePreset {
    Flat,
    /// Periodic Gaussian of height `amplitude`, standard deviation `width`, centred at `center`
    /// (the box midpoint when absent).
    Bump { amplitude: f64, width: f64, center: Option<f64> },
    /// `amplitude · cos(2π k x / L)` along the first axis, `k` cycles per box.
    Cosine { amplitude: f64, wavenumber: u32 },
    /// Random field with spectrum `∝ (1+|ξ|²)^{−s/2−d/4}`, cut at half the Nyquist
    /// wavenumber and scaled to `max |η| = 0.1`.
    Random { seed: u64, smoothness: f64 },
}

impl SurfacePreset {
    pub fn build(&self, grid: &PeriodicGrid) -> Result<SurfaceState> {
        let l = grid.extent();
        let w0 = 2.0 * std::f64::consts::PI / l;
        match *self {
            SurfacePreset::Flat => Ok(SurfaceState::flat(grid)),
            SurfacePreset::Bump { amplitude, width, center } => {
                let c = center.unwrap_or(l / 2.0);
                let k = 1.0 / (w0 * width).powi(2);
                let dim = grid.dim();
                SurfaceState::from_fn(
                    grid,
                    |x| {
                        let mut e = (w0 * (x[0] - c)).cos() - 1.0;
                        if dim == 2 {
                            e += (w0 * (x[1] - c)).cos() - 1.0;
                        }
                        amplitude * (k * e).exp()
                    },
                    0.0,
                )
            }
            SurfacePreset::Cosine { amplitude, wavenumber } => {
                SurfaceState::from_fn(grid, |x| amplitude * (wavenumber as f64 * w0 * x[0]).cos(), 0.0)
            }
            SurfacePreset::Random { seed, smoothness } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let white: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let white = SpectralField::from_real(grid, &white)?;
                let cut = grid.points() as i64 / 4;
                let d = grid.dim() as f64;
                let spec: Vec<C64> = white
                    .spectrum()
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| {
                        let (a, b) = grid.split(i);
                        let ka = grid.wavenumber(a).abs();
                        let kb = if grid.dim() == 2 { grid.wavenumber(b).abs() } else { 0 };
                        if ka.max(kb) >= cut || (ka == 0 && kb == 0) {
                            return C64::new(0.0, 0.0);
                        }
                        let xi = grid.frequency(i);
                        c * (1.0 + xi[0] * xi[0] + xi[1] * xi[1]).powf(-smoothness / 2.0 - d / 4.0)
                    })
                    .collect();
                let f = SpectralField::from_spectrum(grid, spec)?;
                let top = f.max_abs();
                let vals: Vec<f64> = f.values().iter().map(|v| 0.1 * v.re / top).collect();
                SurfaceState::new(SpectralField::from_real(grid, &vals)?, 0.0)
            }
        }
    }
}

fn parse_args(s: &str) -> Result<(String, Vec<f64>)> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("unrecognized surface preset `{s}`"));
    match s.find('(') {
        None => Ok((s.to_string(), Vec::new())),
        Some(open) => {
            let inner = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
            let args = inner
                .split(',')
                .filter(|a| !a.trim().is_empty())
                .map(|a| a.trim().parse::<f64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            Ok((s[..open].trim().to_string(), args))
        }
    }
}

impl FromStr for SurfacePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = parse_args(s)?;
        let arity = |lo: usize, hi: usize| {
            if args.len() < lo || args.len() > hi {
                Err(Error::InvalidInput(format!("preset `{name}` takes {lo}..={hi} arguments, got {}", args.len())))
            } else {
                Ok(())
            }
        };
        match name.as_str() {
            "flat" => {
                arity(0, 0)?;
                Ok(SurfacePreset::Flat)
            }
            "bump" => {
                arity(1, 3)?;
                let width = args.get(1).copied().unwrap_or(0.5);
                if !(width > 0.0) {
                    return Err(Error::InvalidInput(format!("bump width must be positive, got {width}")));
                }
                Ok(SurfacePreset::Bump { amplitude: args[0], width, center: args.get(2).copied() })
            }
            "cosine" => {
                arity(1, 2)?;
                let k = args.get(1).copied().unwrap_or(1.0);
                if k < 0.0 || k.fract() != 0.0 {
                    return Err(Error::InvalidInput(format!("cosine wavenumber must be a whole number, got {k}")));
                }
                Ok(SurfacePreset::Cosine { amplitude: args[0], wavenumber: k as u32 })
            }
            "random" => {
                arity(2, 2)?;
                if args[0] < 0.0 || args[0].fract() != 0.0 {
                    return Err(Error::InvalidInput(format!("random seed must be a whole number, got {}", args[0])));
                }
                Ok(SurfacePreset::Random { seed: args[0] as u64, smoothness: args[1] })
            }
            _ => Err(Error::InvalidInput(format!("unknown surface preset `{name}`"))),
        }
    }
}

impl fmt::Display for SurfacePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfacePreset::Flat => write!(f, "flat"),
            SurfacePreset::Bump { amplitude, width, center: None } => write!(f, "bump({amplitude}, {width})"),
            SurfacePreset::Bump { amplitude, width, center: Some(c) } => write!(f, "bump({amplitude}, {width}, {c})"),
            SurfacePreset::Cosine { amplitude, wavenumber } => write!(f, "cosine({amplitude}, {wavenumber})"),
            SurfacePreset::Random { seed, smoothness } => write!(f, "random({seed}, {smoothness})"),
        }
    }
}

/// `B = (∇η·∇ψ + G(η)ψ)/(1+|∇η|²)` and `V = ∇ψ − B∇η`, given the Dirichlet–Neumann trace `G(η)ψ`.
pub fn trace_velocities(
    eta: &SpectralField,
    psi: &SpectralField,
    g_eta_psi: &SpectralField,
) -> Result<(SpectralField, Vec<SpectralField>)> {
    let grid = eta.grid();
    if psi.grid() != grid || g_eta_psi.grid() != grid {
        return Err(Error::InvalidInput("η, ψ and G(η)ψ must share one grid".into()));
    }
    let d = grid.dim();
    let ge: Vec<SpectralField> = (0..d).map(|a| eta.derivative(a)).collect();
    let gp: Vec<SpectralField> = (0..d).map(|a| psi.derivative(a)).collect();
    let b: Vec<C64> = (0..grid.len())
        .map(|i| {
            let mut dot = 0.0;
            let mut n2 = 0.0;
            for a in 0..d {
                dot += ge[a].values()[i].re * gp[a].values()[i].re;
                n2 += ge[a].values()[i].re.powi(2);
            }
            C64::new((dot + g_eta_psi.values()[i].re) / (1.0 + n2), 0.0)
        })
        .collect();
    let v = (0..d)
        .map(|a| {
            let vals = (0..grid.len()).map(|i| C64::new(gp[a].values()[i].re - b[i].re * ge[a].values()[i].re, 0.0)).collect();
            SpectralField::from_values(grid, vals)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((SpectralField::from_values(grid, b)?, v))
}
