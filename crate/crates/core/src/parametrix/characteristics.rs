//! Bicharacteristics of `p` with their variational blocks, action and transport exponent.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::semiclassical::PulledBackSymbols;
use crate::util::interp::{periodic_lagrange_many, Chebyshev};

/// `[y, ζ, ∂y/∂y₀, ∂ζ/∂y₀, ∂y/∂η, ∂ζ/∂η, I, E]` with `I = ∫(ζ∂_ζp − p)` and `E = ∫c`.
pub type TrajState = [f64; 8];

const COMPONENTS: usize = 8;
const INTERP_ORDER: usize = 12;

/// Lattice of initial data for the characteristics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharacteristicsConfig {
    /// Chebyshev nodes per sign of `η`.
    pub eta_nodes: usize,
    /// `|η|` range covered; must contain `supp χ`.
    pub eta_range: (f64, f64),
    /// Periodic `y₀` lattice size.
    pub y0_nodes: usize,
    /// Step-refinement tolerance on the final states.
    pub tolerance: f64,
}

impl Default for CharacteristicsConfig {
    fn default() -> Self {
        Self { eta_nodes: 32, eta_range: (0.5, 2.0), y0_nodes: 256, tolerance: 1e-10 }
    }
}

/// Trajectories `(y, ζ)(σ; y₀, η)` stored at every RK4 node, for `η` on two Chebyshev
/// lattices (one per sign) and `y₀` on a periodic lattice.
#[derive(Clone, Debug)]
pub struct Bicharacteristics {
    symbols: Arc<PulledBackSymbols>,
    config: CharacteristicsConfig,
    cheb: Chebyshev,
    etas: Vec<f64>,
    steps: usize,
    dsigma: f64,
    /// `data[((ie·(steps+1) + k)·8 + c)·ny + iy]`, with `y − y₀` stored in component 0.
    data: Vec<f64>,
}

fn rhs(ps: &PulledBackSymbols, sigma: f64, s: &TrajState) -> TrajState {
    let (jet, cross) = ps.hamiltonian(sigma, s[0], s[1]);
    let [py, pz] = jet.d;
    let [[pyy, pyz], [_, pzz]] = jet.h;
    let c = cross + 0.5 * pzz * s[3] / s[2];
    [
        pz,
        -py,
        pyz * s[2] + pzz * s[3],
        -pyy * s[2] - pyz * s[3],
        pyz * s[4] + pzz * s[5],
        -pyy * s[4] - pyz * s[5],
        s[1] * pz - jet.v,
        c,
    ]
}

fn rk4(ps: &PulledBackSymbols, sigma: f64, s: &TrajState, dt: f64) -> TrajState {
    let add = |a: &TrajState, b: &TrajState, c: f64| -> TrajState { std::array::from_fn(|i| a[i] + c * b[i]) };
    let k1 = rhs(ps, sigma, s);
    let k2 = rhs(ps, sigma + dt / 2.0, &add(s, &k1, dt / 2.0));
    let k3 = rhs(ps, sigma + dt / 2.0, &add(s, &k2, dt / 2.0));
    let k4 = rhs(ps, sigma + dt, &add(s, &k3, dt));
    std::array::from_fn(|i| s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

fn initial(y0: f64, eta: f64) -> TrajState {
    [y0, eta, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0]
}

/// Integrates every trajectory over the window, doubling the step count from 64 until
/// the final states of successive runs agree to `config.tolerance`.
pub fn solve_characteristics(symbols: Arc<PulledBackSymbols>, config: CharacteristicsConfig) -> Result<Bicharacteristics> {
    let (lo, hi) = config.eta_range;
    if !(0.0 < lo && lo < hi) || config.eta_nodes < 2 || config.y0_nodes < 2 * INTERP_ORDER {
        return Err(Error::InvalidInput(format!("bad characteristics lattice {config:?}")));
    }
    let cheb = Chebyshev::new(config.eta_nodes, lo, hi);
    let etas: Vec<f64> = cheb.nodes().iter().map(|&e| e).chain(cheb.nodes().iter().map(|&e| -e)).collect();
    let window = symbols.frame().params().window();
    let ny = config.y0_nodes;
    let y0 = |i: usize| 2.0 * std::f64::consts::PI * i as f64 / ny as f64;
    let run = |steps: usize| -> Vec<Vec<TrajState>> {
        let dt = window / steps as f64;
        (0..etas.len() * ny)
            .into_par_iter()
            .map(|idx| {
                let (ie, iy) = (idx / ny, idx % ny);
                let mut s = initial(y0(iy), etas[ie]);
                let mut out = Vec::with_capacity(steps + 1);
                out.push(s);
                for k in 0..steps {
                    s = rk4(&symbols, k as f64 * dt, &s, dt);
                    out.push(s);
                }
                out
            })
            .collect()
    };
    let mut steps = 64;
    let mut coarse = run(steps);
    let fine = loop {
        let fine = run(2 * steps);
        let gap = coarse
            .iter()
            .zip(&fine)
            .flat_map(|(a, b)| {
                let (a, b) = (a.last().expect("nonempty"), b.last().expect("nonempty"));
                (0..COMPONENTS).map(move |c| (a[c] - b[c]).abs())
            })
            .fold(0.0, f64::max);
        steps *= 2;
        if gap <= config.tolerance {
            break fine;
        }
        if steps >= 4096 || !gap.is_finite() {
            return Err(Error::Abort(format!("characteristics unresolved at {steps} steps (refinement gap {gap:.3e})")));
        }
        coarse = fine;
    };
    let mut data = vec![0.0; etas.len() * (steps + 1) * COMPONENTS * ny];
    for (idx, traj) in fine.iter().enumerate() {
        let (ie, iy) = (idx / ny, idx % ny);
        for (k, s) in traj.iter().enumerate() {
            for c in 0..COMPONENTS {
                let v = if c == 0 { s[0] - y0(iy) } else { s[c] };
                data[((ie * (steps + 1) + k) * COMPONENTS + c) * ny + iy] = v;
            }
        }
    }
    Ok(Bicharacteristics { symbols, config, cheb, etas, steps, dsigma: window / steps as f64, data })
}

impl Bicharacteristics {
    pub fn symbols(&self) -> &PulledBackSymbols {
        &self.symbols
    }

    pub fn config(&self) -> &CharacteristicsConfig {
        &self.config
    }

    /// Chebyshev lattice shared by both signs of `η`.
    pub fn chebyshev(&self) -> &Chebyshev {
        &self.cheb
    }

    /// Positive nodes first, then their negatives.
    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dsigma(&self) -> f64 {
        self.dsigma
    }

    pub fn window(&self) -> f64 {
        self.dsigma * self.steps as f64
    }

    fn component(&self, ie: usize, k: usize, c: usize) -> &[f64] {
        let ny = self.config.y0_nodes;
        let start = ((ie * (self.steps + 1) + k) * COMPONENTS + c) * ny;
        &self.data[start..start + ny]
    }

    /// Stored state at node `k` for initial point `y₀` (interpolated between lattice points).
    pub fn node_state(&self, ie: usize, k: usize, y0: f64) -> TrajState {
        let ny = self.config.y0_nodes;
        let dy = 2.0 * std::f64::consts::PI / ny as f64;
        let f: [&[f64]; COMPONENTS] = std::array::from_fn(|c| self.component(ie, k, c));
        let mut s = periodic_lagrange_many(f, 0.0, dy, y0, INTERP_ORDER);
        s[0] += y0;
        s
    }

    /// State at any `σ` in the window: nearest node, then one RK4 substep.
    pub fn state(&self, ie: usize, sigma: f64, y0: f64) -> TrajState {
        let k = ((sigma / self.dsigma).round().max(0.0) as usize).min(self.steps);
        let s = self.node_state(ie, k, y0);
        let dt = sigma - k as f64 * self.dsigma;
        if dt == 0.0 {
            s
        } else {
            rk4(&self.symbols, k as f64 * self.dsigma, &s, dt)
        }
    }

    /// A single trajectory from `(y₀, η)` to `σ`, at the stored step size.
    pub fn shoot(&self, sigma: f64, y0: f64, eta: f64) -> TrajState {
        let n = ((sigma / self.dsigma).ceil() as usize).max(1);
        let dt = sigma / n as f64;
        let mut s = initial(y0, eta);
        for k in 0..n {
            s = rk4(&self.symbols, k as f64 * dt, &s, dt);
        }
        s
    }

    /// `κ` with `y(σ; κ, η_ie) = y`, Newton on the stored lattice.
    pub fn invert_node(&self, ie: usize, sigma: f64, y: f64, guess: Option<f64>) -> Result<(f64, TrajState)> {
        let mut y0 = guess.unwrap_or(y);
        for _ in 0..30 {
            let s = self.state(ie, sigma, y0);
            let r = s[0] - y;
            if r.abs() <= 1e-13 * (1.0 + y.abs()) {
                return Ok((y0, s));
            }
            y0 -= r / s[2];
        }
        Err(Error::Abort(format!("flow inversion diverged at σ = {sigma}, y = {y}, η = {}", self.etas[ie])))
    }

    /// `(κ, I(κ), E(κ))` at stored node `k`, interpolating only what the Newton iteration needs.
    pub fn invert_fast(&self, ie: usize, k: usize, y: f64, guess: f64) -> Result<(f64, f64, f64)> {
        let ny = self.config.y0_nodes;
        let dy = 2.0 * std::f64::consts::PI / ny as f64;
        let (d, jac) = (self.component(ie, k, 0), self.component(ie, k, 2));
        let mut y0 = guess;
        for _ in 0..30 {
            let [dv, j] = periodic_lagrange_many([d, jac], 0.0, dy, y0, INTERP_ORDER);
            let r = y0 + dv - y;
            if r.abs() <= 1e-13 * (1.0 + y.abs()) {
                let [i, e] = periodic_lagrange_many([self.component(ie, k, 6), self.component(ie, k, 7)], 0.0, dy, y0, INTERP_ORDER);
                return Ok((y0, i, e));
            }
            y0 -= r / j;
        }
        Err(Error::Abort(format!("flow inversion diverged at node {k}, y = {y}, η = {}", self.etas[ie])))
    }

    /// `κ(σ; y, η)` for arbitrary `η`, by Newton on single trajectories started at `y₀ = y`.
    pub fn invert_flow(&self, sigma: f64, y: f64, eta: f64) -> Result<(f64, TrajState)> {
        let mut y0 = y;
        for _ in 0..30 {
            let s = self.shoot(sigma, y0, eta);
            let r = s[0] - y;
            if r.abs() <= 1e-13 * (1.0 + y.abs()) {
                return Ok((y0, s));
            }
            y0 -= r / s[2];
        }
        Err(Error::Abort(format!("flow inversion diverged at σ = {sigma}, y = {y}, η = {eta}")))
    }

    /// `sup |∂y/∂y₀ − 1|` and `sup |∂ζ/∂y₀|` over the stored lattice.
    pub fn variational_bounds(&self) -> (f64, f64) {
        let mut out = (0.0f64, 0.0f64);
        for ie in 0..self.etas.len() {
            for k in 0..=self.steps {
                out.0 = self.component(ie, k, 2).iter().fold(out.0, |m, v| m.max((v - 1.0).abs()));
                out.1 = self.component(ie, k, 3).iter().fold(out.1, |m, v| m.max(v.abs()));
            }
        }
        out
    }

    /// `𝓕 = ∫₀^{h^δ} sup ‖M(s)‖ ds`, `M` the coefficient matrix of the variational system
    /// (Frobenius norm, sup over the stored trajectories). The blocks obey `‖Φ − I‖ ≤ e^𝓕 − 1`.
    pub fn gronwall_exponent(&self) -> f64 {
        let ny = self.config.y0_nodes;
        let sup: Vec<f64> = (0..=self.steps)
            .into_par_iter()
            .map(|k| {
                let sigma = k as f64 * self.dsigma;
                let mut m: f64 = 0.0;
                for ie in 0..self.etas.len() {
                    let (y, z) = (self.component(ie, k, 0), self.component(ie, k, 1));
                    for iy in 0..ny {
                        let y0 = 2.0 * std::f64::consts::PI * iy as f64 / ny as f64;
                        let (jet, _) = self.symbols.hamiltonian(sigma, y0 + y[iy], z[iy]);
                        let [[pyy, pyz], [_, pzz]] = jet.h;
                        m = m.max((2.0 * pyz * pyz + pyy * pyy + pzz * pzz).sqrt());
                    }
                }
                m
            })
            .collect();
        let inner: f64 = sup[1..self.steps].iter().sum();
        self.dsigma * (inner + 0.5 * (sup[0] + sup[self.steps]))
    }

    /// `sup |p(σ, y(σ), ζ(σ)) − p(0, y₀, η)|` at the end of the window, meaningful when `p` is σ-independent.
    pub fn hamiltonian_drift(&self) -> f64 {
        let ps = &self.symbols;
        let ny = self.config.y0_nodes;
        let w = self.window();
        (0..self.etas.len())
            .flat_map(|ie| (0..ny).map(move |iy| (ie, iy)))
            .map(|(ie, iy)| {
                let y0 = 2.0 * std::f64::consts::PI * iy as f64 / ny as f64;
                let s = self.node_state(ie, self.steps, y0);
                (ps.p(w, s[0], s[1]) - ps.p(0.0, y0, self.etas[ie])).abs()
            })
            .fold(0.0, f64::max)
    }
}
