use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::{PeriodicGrid, Vec2};
use crate::error::{Error, Result};

pub type C64 = Complex64;

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let mut p = planner().lock().expect("fft planner poisoned");
    if forward {
        p.plan_fft_forward(n)
    } else {
        p.plan_fft_inverse(n)
    }
}

/// In-place unnormalized 1-D transform.
pub fn fft_inplace(data: &mut [C64], forward: bool) {
    plan(data.len(), forward).process(data);
}

fn transform(grid: &PeriodicGrid, data: &mut [C64], forward: bool) {
    let [n0, n1] = grid.shape();
    if grid.dim() == 1 {
        fft_inplace(data, forward);
        return;
    }
    let row = plan(n1, forward);
    for r in data.chunks_mut(n1) {
        row.process(r);
    }
    let col = plan(n0, forward);
    let mut buf = vec![C64::new(0.0, 0.0); n0];
    for c in 0..n1 {
        for r in 0..n0 {
            buf[r] = data[r * n1 + c];
        }
        col.process(&mut buf);
        for r in 0..n0 {
            data[r * n1 + c] = buf[r];
        }
    }
}

/// Coefficients `c_k = N^{-d} Σ_x u(x) e^{-ik·x}`, so a unit-amplitude mode has coefficient 1.
pub fn forward(grid: &PeriodicGrid, values: &[C64]) -> Vec<C64> {
    let mut out = values.to_vec();
    transform(grid, &mut out, true);
    let s = 1.0 / grid.len() as f64;
    for c in &mut out {
        *c *= s;
    }
    out
}

pub fn inverse(grid: &PeriodicGrid, spectrum: &[C64]) -> Vec<C64> {
    let mut out = spectrum.to_vec();
    transform(grid, &mut out, false);
    out
}

/// Complex samples on a periodic grid with a lazily computed spectrum.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: PeriodicGrid,
    values: Vec<C64>,
    spectrum: OnceLock<Vec<C64>>,
}

impl SpectralField {
    pub fn from_values(grid: &PeriodicGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "field has {} samples, grid expects {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid: grid.clone(), values, spectrum: OnceLock::new() })
    }

    pub fn from_real(grid: &PeriodicGrid, values: &[f64]) -> Result<Self> {
        Self::from_values(grid, values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn from_fn(grid: &PeriodicGrid, f: impl Fn(Vec2) -> C64) -> Self {
        let values = grid.points_iter().map(f).collect();
        Self { grid: grid.clone(), values, spectrum: OnceLock::new() }
    }

    pub fn from_real_fn(grid: &PeriodicGrid, f: impl Fn(Vec2) -> f64) -> Self {
        Self::from_fn(grid, |x| C64::new(f(x), 0.0))
    }

    pub fn from_spectrum(grid: &PeriodicGrid, spectrum: Vec<C64>) -> Result<Self> {
        if spectrum.len() != grid.len() {
            return Err(Error::InvalidInput("spectrum length does not match grid".into()));
        }
        let values = inverse(grid, &spectrum);
        let cell = OnceLock::new();
        let _ = cell.set(spectrum);
        Ok(Self { grid: grid.clone(), values, spectrum: cell })
    }

    pub fn zeros(grid: &PeriodicGrid) -> Self {
        Self { grid: grid.clone(), values: vec![C64::new(0.0, 0.0); grid.len()], spectrum: OnceLock::new() }
    }

    /// `amplitude · e^{i k·x}` for a lattice wavenumber vector `k` (integer units of `2π/L`).
    pub fn mode(grid: &PeriodicGrid, k: [i64; 2], amplitude: C64) -> Self {
        let dk = grid.dual_spacing();
        let xi = [k[0] as f64 * dk, k[1] as f64 * dk];
        Self::from_fn(grid, |x| amplitude * C64::from_polar(1.0, xi[0] * x[0] + xi[1] * x[1]))
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn spectrum(&self) -> &[C64] {
        self.spectrum.get_or_init(|| forward(&self.grid, &self.values))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// `(∫|u|²)^{1/2}` by the grid rule.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    /// `∫ u·conj(w)`.
    pub fn inner(&self, other: &SpectralField) -> C64 {
        let s: C64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        s * self.grid.cell_volume()
    }

    pub fn zip_with(&self, other: &SpectralField, f: impl Fn(C64, C64) -> C64) -> SpectralField {
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        SpectralField { grid: self.grid.clone(), values, spectrum: OnceLock::new() }
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> SpectralField {
        SpectralField { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect(), spectrum: OnceLock::new() }
    }

    pub fn add(&self, other: &SpectralField) -> SpectralField {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &SpectralField) -> SpectralField {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: C64) -> SpectralField {
        self.map(|v| v * c)
    }

    /// Spectral partial derivative along `axis`.
    pub fn derivative(&self, axis: usize) -> SpectralField {
        let spec: Vec<C64> = self
            .spectrum()
            .iter()
            .enumerate()
            .map(|(i, &c)| c * C64::new(0.0, self.grid.frequency(i)[axis]))
            .collect();
        SpectralField::from_spectrum(&self.grid, spec).expect("same grid")
    }

    /// Relative energy at or above half the Nyquist wavenumber along any axis.
    pub fn top_octave_energy(&self) -> f64 {
        let n = self.grid.points() as i64;
        let spec = self.spectrum();
        let (mut top, mut total) = (0.0, 0.0);
        for (i, c) in spec.iter().enumerate() {
            let (i0, i1) = self.grid.split(i);
            let k0 = self.grid.wavenumber(i0).abs();
            let k1 = if self.grid.dim() == 2 { self.grid.wavenumber(i1).abs() } else { 0 };
            let e = c.norm_sqr();
            total += e;
            if k0.max(k1) >= n / 4 {
                top += e;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            top / total
        }
    }

    /// Trigonometric interpolation at an arbitrary point (direct sum over the spectrum).
    pub fn eval_at(&self, x: Vec2) -> C64 {
        let spec = self.spectrum();
        let mut s = C64::new(0.0, 0.0);
        for (i, c) in spec.iter().enumerate() {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let f = self.grid.frequency(i);
            s += c * C64::from_polar(1.0, f[0] * x[0] + f[1] * x[1]);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(grid: &PeriodicGrid, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals = (0..grid.len()).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        SpectralField::from_values(grid, vals).unwrap()
    }

    #[test]
    fn roundtrip_1d_and_2d() {
        for grid in [PeriodicGrid::new(1, 3.0, 256).unwrap(), PeriodicGrid::new(2, 5.0, 32).unwrap()] {
            let u = random_field(&grid, 7);
            let back = SpectralField::from_spectrum(&grid, u.spectrum().to_vec()).unwrap();
            let err: f64 = u.values().iter().zip(back.values()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            let nrm: f64 = u.values().iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            assert!(err / nrm < 1e-12, "round trip error {}", err / nrm);
        }
    }

    #[test]
    fn unit_mode_has_unit_coefficient() {
        let grid = PeriodicGrid::new(1, 2.0 * PI, 64).unwrap();
        let u = SpectralField::mode(&grid, [5, 0], C64::new(1.0, 0.0));
        let idx = grid.index_of_wavenumber(5).unwrap();
        assert!((u.spectrum()[idx] - C64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn eval_at_reproduces_grid_values() {
        let grid = PeriodicGrid::new(1, 2.0 * PI, 32).unwrap();
        let u = SpectralField::from_real_fn(&grid, |x| (2.0 * x[0]).sin() + 0.5 * (3.0 * x[0]).cos());
        let x: f64 = 0.123;
        let exact = (2.0 * x).sin() + 0.5 * (3.0 * x).cos();
        assert!((u.eval_at([x, 0.0]).re - exact).abs() < 1e-13);
    }
}
