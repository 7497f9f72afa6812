use num_complex::Complex64 as C64;

use crate::spectral::SpectralField;

/// Real, band-limited periodic function `f(x) = Σ_k c_k e^{ikωx}` with `ω = 2π/L`,
/// evaluated exactly (value and derivatives) at arbitrary points.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    omega: f64,
    /// `(k, c_k)` for `k ≥ 0`; negative modes are the conjugates.
    modes: Vec<(i64, C64)>,
}

impl TrigPoly {
    pub fn constant(c: f64, period: f64) -> Self {
        Self { omega: 2.0 * std::f64::consts::PI / period, modes: vec![(0, C64::new(c, 0.0))] }
    }

    /// `Σ amplitude·sin(k ω x + phase)`-type builder from explicit modes.
    pub fn from_modes(period: f64, mut modes: Vec<(i64, C64)>) -> Self {
        assert!(modes.iter().all(|m| m.0 >= 0), "modes are listed for k ≥ 0");
        modes.sort_by_key(|m| m.0);
        Self { omega: 2.0 * std::f64::consts::PI / period, modes }
    }

    /// Real part of a one-dimensional field, keeping coefficients above `tol · max|c|`.
    pub fn from_field(u: &SpectralField, tol: f64) -> Self {
        let g = u.grid();
        assert_eq!(g.dim(), 1, "trigonometric polynomials are one-dimensional");
        let spec = u.spectrum();
        let n = g.points();
        let cmax = spec.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        let mut modes = Vec::new();
        for k in 0..(n / 2) as i64 {
            let cp = spec[k as usize];
            let cm = if k == 0 { cp } else { spec[n - k as usize] };
            // coefficient of the real part: (c_k + conj(c_{-k})) / 2
            let c = (cp + cm.conj()) * 0.5;
            if c.norm() > tol * cmax {
                modes.push((k, c));
            }
        }
        Self { omega: g.dual_spacing(), modes }
    }

    pub fn bandwidth(&self) -> i64 {
        self.modes.iter().map(|m| m.0).max().unwrap_or(0)
    }

    pub fn modes(&self) -> &[(i64, C64)] {
        &self.modes
    }

    /// `[f, f′, f″, f‴]` at `x`.
    pub fn eval(&self, x: f64) -> [f64; 4] {
        let mut out = [0.0; 4];
        // modes are sorted, so e^{ikωx} follows from one exponential by recurrence
        let base = C64::from_polar(1.0, self.omega * x);
        let (mut kk, mut pw) = (0i64, C64::new(1.0, 0.0));
        for &(k, c) in &self.modes {
            while kk < k {
                pw *= base;
                kk += 1;
            }
            let w = k as f64 * self.omega;
            let e = pw * c;
            let f = if k == 0 { 1.0 } else { 2.0 };
            // d/dx e^{iwx} = iw e^{iwx}
            out[0] += f * e.re;
            out[1] += f * (e * C64::new(0.0, w)).re;
            out[2] += f * (e * (-w * w)).re;
            out[3] += f * (e * C64::new(0.0, -w * w * w)).re;
        }
        out
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval(x)[0]
    }

    pub fn sup_norm(&self, samples: usize, period: f64) -> f64 {
        (0..samples).map(|i| self.value(period * i as f64 / samples as f64).abs()).fold(0.0, f64::max)
    }
}
