//! Finite-difference weights on arbitrary nodes.

/// Fornberg's recursion: `w[m][i]` approximates the `m`-th derivative at `z` from `f(x_i)`.
pub fn fornberg(z: f64, x: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Centered `(offset, weight)` pairs for the `n`-th derivative with step `h`,
/// accurate to roughly eighth order; `n = 0` is the identity.
pub fn central_stencil(n: usize, h: f64) -> Vec<(f64, f64)> {
    if n == 0 {
        return vec![(0.0, 1.0)];
    }
    let half = (n + 1) / 2 + 3;
    let nodes: Vec<f64> = (-(half as i64)..=half as i64).map(|k| k as f64).collect();
    let w = fornberg(0.0, &nodes, n);
    let scale = h.powi(-(n as i32));
    nodes.iter().zip(&w[n]).filter(|(_, &wi)| wi != 0.0).map(|(&o, &wi)| (o, wi * scale)).collect()
}
