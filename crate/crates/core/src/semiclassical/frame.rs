//! The straightening flow `Ẋ = h^{1/2} V_h(X)` with its first three `y`-variations, and the
//! two-point frame functions built from it.

use rayon::prelude::*;

use super::params::SemiclassicalParams;
use crate::error::{Error, Result};
use crate::util::interp::periodic_lagrange_many;
use crate::util::quad::gauss_legendre_unit;
use crate::util::TrigPoly;

/// Number of `y` nodes on which the flow is stored.
pub const FRAME_NODES: usize = 256;
const INTERP_ORDER: usize = 12;
const REFINE_TOL: f64 = 1e-10;
const MAX_STEPS: usize = 1 << 14;
/// Below this separation `H(y, y′)` is a Gauss–Legendre average of `X′` instead of a difference quotient.
const NEAR_DIAGONAL: f64 = 1e-2;

/// `[X, X′, X″, X‴]` at one point.
pub type FlowState = [f64; 4];

#[derive(Clone, Debug)]
pub struct StraightenedFrame {
    params: SemiclassicalParams,
    velocity: TrigPoly,
    rate: f64,
    steps: usize,
    dsigma: f64,
    identity: bool,
    /// Per σ-node: `X − y`, `X′`, `X″`, `X‴` on the `y` lattice.
    nodes: Vec<[Vec<f64>; 4]>,
}

fn rhs(v: &TrigPoly, rate: f64, s: FlowState) -> FlowState {
    let [v0, v1, v2, v3] = v.eval(s[0]);
    let (x1, x2, x3) = (s[1], s[2], s[3]);
    [
        rate * v0,
        rate * v1 * x1,
        rate * (v2 * x1 * x1 + v1 * x2),
        rate * (v3 * x1 * x1 * x1 + 3.0 * v2 * x1 * x2 + v1 * x3),
    ]
}

fn rk4(v: &TrigPoly, rate: f64, s: FlowState, dt: f64) -> FlowState {
    let add = |a: FlowState, b: FlowState, c: f64| [a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2], a[3] + c * b[3]];
    let k1 = rhs(v, rate, s);
    let k2 = rhs(v, rate, add(s, k1, dt / 2.0));
    let k3 = rhs(v, rate, add(s, k2, dt / 2.0));
    let k4 = rhs(v, rate, add(s, k3, dt));
    let mut out = s;
    for i in 0..4 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn lattice_y(i: usize) -> f64 {
    2.0 * std::f64::consts::PI * i as f64 / FRAME_NODES as f64
}

/// Integrates the flow on the default `y` lattice; `budget` bounds `h^{1/2+δ}·sup|V_h′|`
/// (the short-time proviso of the straightening argument, default 0.1).
pub fn integrate_straightening(velocity: &TrigPoly, params: &SemiclassicalParams) -> Result<StraightenedFrame> {
    integrate_straightening_with(velocity, params, 0.1)
}

pub fn integrate_straightening_with(velocity: &TrigPoly, params: &SemiclassicalParams, budget: f64) -> Result<StraightenedFrame> {
    let rate = params.h().sqrt();
    let window = params.window();
    let slope = (0..4 * FRAME_NODES).map(|i| velocity.eval(lattice_y(i) / 4.0)[1].abs()).fold(0.0, f64::max);
    if params.time_window() * slope > budget {
        return Err(Error::InvalidInput(format!(
            "h^(1/2+δ)·sup|V′| = {:.3e} exceeds the flow budget {budget}",
            params.time_window() * slope
        )));
    }
    let identity = velocity.modes().iter().all(|m| m.1.norm() == 0.0);
    let run = |steps: usize| -> Vec<[Vec<f64>; 4]> {
        let dt = window / steps as f64;
        let per_y: Vec<Vec<FlowState>> = (0..FRAME_NODES)
            .into_par_iter()
            .map(|i| {
                let mut s = [lattice_y(i), 1.0, 0.0, 0.0];
                let mut out = Vec::with_capacity(steps + 1);
                out.push(s);
                for _ in 0..steps {
                    s = rk4(velocity, rate, s, dt);
                    out.push(s);
                }
                out
            })
            .collect();
        (0..=steps)
            .map(|k| {
                let mut node: [Vec<f64>; 4] = Default::default();
                for c in 0..4 {
                    node[c] = (0..FRAME_NODES)
                        .map(|i| per_y[i][k][c] - if c == 0 { lattice_y(i) } else { 0.0 })
                        .collect();
                }
                node
            })
            .collect()
    };
    let check = |nodes: &[[Vec<f64>; 4]], steps: usize| -> Result<()> {
        for (k, node) in nodes.iter().enumerate() {
            if node.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::Abort(format!("flow left the finite range at σ-node {k}/{steps}")));
            }
            if let Some(i) = node[1].iter().position(|&d| d <= 1e-8) {
                return Err(Error::Abort(format!(
                    "∂X/∂y = {:.3e} is singular at y = {:.6}, σ = {:.6}",
                    node[1][i],
                    lattice_y(i),
                    k as f64 * window / steps as f64
                )));
            }
        }
        Ok(())
    };
    let mut steps = 64;
    let mut coarse = run(steps);
    let nodes = loop {
        if identity {
            break coarse;
        }
        let fine = run(2 * steps);
        let (last_c, last_f) = (coarse.last().expect("steps ≥ 1"), fine.last().expect("steps ≥ 1"));
        let err = (0..4)
            .flat_map(|c| last_c[c].iter().zip(&last_f[c]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        steps *= 2;
        if err <= REFINE_TOL {
            check(&fine, steps)?;
            break fine;
        }
        if steps >= MAX_STEPS || !err.is_finite() {
            check(&fine, steps)?;
            return Err(Error::Abort(format!("straightening flow unresolved at {steps} steps (refinement gap {err:.3e})")));
        }
        coarse = fine;
    };
    let steps = nodes.len() - 1;
    Ok(StraightenedFrame { params: *params, velocity: velocity.clone(), rate, steps, dsigma: window / steps as f64, identity, nodes })
}

impl StraightenedFrame {
    pub fn params(&self) -> &SemiclassicalParams {
        &self.params
    }

    pub fn velocity(&self) -> &TrigPoly {
        &self.velocity
    }

    /// RK4 steps over the window after refinement.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    /// `[X, X′, X″, X‴](σ; y)`: interpolated from the nearest stored σ-node, then one RK4 substep.
    pub fn state(&self, sigma: f64, y: f64) -> FlowState {
        if self.identity {
            return [y, 1.0, 0.0, 0.0];
        }
        let k = ((sigma / self.dsigma).round().max(0.0) as usize).min(self.steps);
        let node = &self.nodes[k];
        let dy = lattice_y(1);
        let [d, x1, x2, x3] =
            periodic_lagrange_many([&node[0], &node[1], &node[2], &node[3]], 0.0, dy, y, INTERP_ORDER);
        let s = [y + d, x1, x2, x3];
        let dt = sigma - k as f64 * self.dsigma;
        if dt == 0.0 {
            s
        } else {
            rk4(&self.velocity, self.rate, s, dt)
        }
    }

    pub fn x(&self, sigma: f64, y: f64) -> f64 {
        self.state(sigma, y)[0]
    }

    /// `∂X/∂y`.
    pub fn jacobian(&self, sigma: f64, y: f64) -> f64 {
        self.state(sigma, y)[1]
    }

    /// `M⁰ = (∂X/∂y)^{−T}`, a scalar in one dimension.
    pub fn m0(&self, sigma: f64, y: f64) -> f64 {
        1.0 / self.jacobian(sigma, y)
    }

    /// `H(y, y′) = ∫₀¹ ∂X/∂y(λy + (1−λ)y′) dλ`.
    pub fn h_two(&self, sigma: f64, y: f64, yp: f64) -> f64 {
        let gap = y - yp;
        if gap == 0.0 {
            return self.jacobian(sigma, y);
        }
        if gap.abs() >= NEAR_DIAGONAL {
            return (self.x(sigma, y) - self.x(sigma, yp)) / gap;
        }
        let (t, w) = gauss_legendre_unit(8);
        t.iter().zip(&w).map(|(&t, &w)| w * self.jacobian(sigma, yp + t * gap)).sum()
    }

    /// `M = H^{−T}`.
    pub fn m_two(&self, sigma: f64, y: f64, yp: f64) -> f64 {
        1.0 / self.h_two(sigma, y, yp)
    }

    /// `J = |det ∂X/∂y(y′)| / |det H(y, y′)|`.
    pub fn j_two(&self, sigma: f64, y: f64, yp: f64) -> f64 {
        if y == yp {
            return 1.0;
        }
        self.jacobian(sigma, yp).abs() / self.h_two(sigma, y, yp).abs()
    }

    /// `X^{−1}(σ; x)` by Newton iteration.
    pub fn inverse(&self, sigma: f64, x: f64) -> Result<f64> {
        if self.identity {
            return Ok(x);
        }
        let mut y = x;
        for _ in 0..40 {
            let s = self.state(sigma, y);
            let step = (s[0] - x) / s[1];
            y -= step;
            if step.abs() <= 1e-15 * (1.0 + x.abs()) {
                return Ok(y);
            }
        }
        Err(Error::Abort(format!("X⁻¹ did not converge at x = {x}, σ = {sigma}")))
    }

    /// `sup_{σ-nodes, y} |∂X/∂y − 1|`.
    pub fn jacobian_deviation(&self) -> f64 {
        self.nodes.iter().flat_map(|n| n[1].iter()).map(|d| (d - 1.0).abs()).fold(0.0, f64::max)
    }
}
