//! Local polynomial interpolation on uniform lattices.

/// Barycentric-free Lagrange weights for nodes `0..n` (offsets from the stencil start) at `t`.
fn lagrange_weights(n: usize, t: f64, w: &mut [f64]) {
    for (i, wi) in w.iter_mut().enumerate().take(n) {
        let mut p = 1.0;
        for j in 0..n {
            if j != i {
                p *= (t - j as f64) / (i as f64 - j as f64);
            }
        }
        *wi = p;
    }
}

/// Interpolates periodic samples `f_i = f(x0 + i·dx)`, `i < len`, with an `order`-point stencil.
pub fn periodic_lagrange(f: &[f64], x0: f64, dx: f64, x: f64, order: usize) -> f64 {
    let n = f.len() as i64;
    let s = (x - x0) / dx;
    let base = s.floor() as i64 - (order as i64 / 2 - 1);
    let t = s - base as f64;
    let mut w = [0.0; 16];
    lagrange_weights(order, t, &mut w);
    (0..order).map(|i| w[i] * f[(base + i as i64).rem_euclid(n) as usize]).sum()
}

/// Same stencil for several sample arrays sharing one lattice.
pub fn periodic_lagrange_many<const M: usize>(fs: [&[f64]; M], x0: f64, dx: f64, x: f64, order: usize) -> [f64; M] {
    let n = fs[0].len() as i64;
    let s = (x - x0) / dx;
    let base = s.floor() as i64 - (order as i64 / 2 - 1);
    let t = s - base as f64;
    let mut w = [0.0; 16];
    lagrange_weights(order, t, &mut w);
    let mut out = [0.0; M];
    for i in 0..order {
        let idx = (base + i as i64).rem_euclid(n) as usize;
        for (m, f) in fs.iter().enumerate() {
            out[m] += w[i] * f[idx];
        }
    }
    out
}

/// Non-periodic Lagrange interpolation on `x0 + i·dx`, stencil clamped to the data.
pub fn lagrange(f: &[f64], x0: f64, dx: f64, x: f64, order: usize) -> f64 {
    let (base, w) = clamped_weights(f.len(), x0, dx, x, order);
    (0..order).map(|i| w[i] * f[base + i]).sum()
}

/// Stencil start and weights for [`lagrange`], reusable across arrays.
pub fn clamped_weights(len: usize, x0: f64, dx: f64, x: f64, order: usize) -> (usize, [f64; 16]) {
    let order = order.min(len);
    let s = (x - x0) / dx;
    let mut base = s.floor() as i64 - (order as i64 / 2 - 1);
    base = base.clamp(0, len as i64 - order as i64);
    let t = s - base as f64;
    let mut w = [0.0; 16];
    lagrange_weights(order, t, &mut w);
    (base as usize, w)
}

/// Chebyshev–Lobatto nodes on `[a, b]` with barycentric interpolation weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Chebyshev {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Chebyshev {
    pub fn new(n: usize, a: f64, b: f64) -> Self {
        assert!(n >= 2 && b > a, "need two nodes on a proper interval");
        let nodes = (0..n)
            .map(|j| {
                let t = (std::f64::consts::PI * j as f64 / (n - 1) as f64).cos();
                0.5 * (a + b) - 0.5 * (b - a) * t
            })
            .collect();
        let weights = (0..n)
            .map(|j| {
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == n - 1 {
                    0.5 * s
                } else {
                    s
                }
            })
            .collect();
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Normalized cardinal weights at `x`: `f(x) ≈ Σ w_i f_i`.
    pub fn cardinal(&self, x: f64) -> Vec<f64> {
        if let Some(i) = self.nodes.iter().position(|&t| t == x) {
            let mut w = vec![0.0; self.nodes.len()];
            w[i] = 1.0;
            return w;
        }
        let mut w: Vec<f64> = self.nodes.iter().zip(&self.weights).map(|(&t, &b)| b / (x - t)).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= total);
        w
    }

    pub fn eval(&self, values: &[f64], x: f64) -> f64 {
        self.cardinal(x).iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn periodic_interpolation_is_accurate_for_smooth_data() {
        let n = 128;
        let dx = 2.0 * PI / n as f64;
        let f: Vec<f64> = (0..n).map(|i| (3.0 * i as f64 * dx).sin()).collect();
        for &x in &[0.01, 1.234, 6.2, -0.3, 7.0] {
            let v = periodic_lagrange(&f, 0.0, dx, x, 10);
            assert!((v - (3.0 * x).sin()).abs() < 1e-11, "x={x}");
        }
    }

    #[test]
    fn chebyshev_interpolant_converges_geometrically() {
        let c = Chebyshev::new(32, 0.5, 2.0);
        assert_eq!(c.nodes()[0], 0.5);
        assert!((c.nodes()[31] - 2.0).abs() < 1e-15);
        let f: Vec<f64> = c.nodes().iter().map(|&x: &f64| x.powf(1.5) * (3.0 * x).sin()).collect();
        for &x in &[0.5, 0.61, 1.0, 1.77, 2.0] {
            assert!((c.eval(&f, x) - x.powf(1.5) * (3.0 * x).sin()).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn clamped_interpolation_is_exact_for_polynomials() {
        let f: Vec<f64> = (0..20).map(|i| { let x = 0.5 + 0.1 * i as f64; x * x * x - x }).collect();
        for &x in &[0.5, 0.52, 1.37, 2.4] {
            let v = lagrange(&f, 0.5, 0.1, x, 6);
            assert!((v - (x * x * x - x)).abs() < 1e-12);
        }
    }
}
