use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A point or frequency in one or two dimensions. Unused trailing components are zero.
pub type Vec2 = [f64; 2];

pub fn norm(v: Vec2) -> f64 {
    v[0].hypot(v[1])
}

pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Uniform periodic box `[0, L)^d`, standing in for the whole space.
///
/// Samples are stored row-major: index `i0 * n1 + i1`, with `n1 = 1` in one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicGrid {
    dim: usize,
    extent: [f64; 2],
    points: [usize; 2],
}

impl PeriodicGrid {
    pub fn new(dim: usize, extent: f64, points: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidInput(format!("grid dimension must be 1 or 2, got {dim}")));
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(Error::InvalidInput(format!("grid extent must be positive, got {extent}")));
        }
        if points < 16 || !points.is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "grid points must be a power of two and at least 16, got {points}"
            )));
        }
        let (ext, pts) = if dim == 1 { ([extent, 1.0], [points, 1]) } else { ([extent; 2], [points; 2]) };
        Ok(Self { dim, extent: ext, points: pts })
    }

    /// Defaults: `L = 16π, N = 2048` in one dimension; `L = 8π, N = 256` per axis in two.
    pub fn default_for(dim: usize) -> Result<Self> {
        match dim {
            1 => Self::new(1, 2.0 * PI * 8.0, 2048),
            2 => Self::new(2, 2.0 * PI * 4.0, 256),
            _ => Err(Error::InvalidInput(format!("grid dimension must be 1 or 2, got {dim}"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extent(&self) -> f64 {
        self.extent[0]
    }

    /// Points per axis.
    pub fn points(&self) -> usize {
        self.points[0]
    }

    pub fn shape(&self) -> [usize; 2] {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points[0] * self.points[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> f64 {
        self.extent[0] / self.points[0] as f64
    }

    /// Quadrature weight of one cell, `(L/N)^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// `L^d`.
    pub fn volume(&self) -> f64 {
        self.extent[0].powi(self.dim as i32)
    }

    /// Frequency lattice spacing `2π/L`.
    pub fn dual_spacing(&self) -> f64 {
        2.0 * PI / self.extent[0]
    }

    /// Largest representable lattice frequency magnitude per axis, `πN/L`.
    pub fn nyquist(&self) -> f64 {
        PI * self.points[0] as f64 / self.extent[0]
    }

    pub fn split(&self, idx: usize) -> (usize, usize) {
        (idx / self.points[1], idx % self.points[1])
    }

    pub fn point(&self, idx: usize) -> Vec2 {
        let (i0, i1) = self.split(idx);
        let h = self.spacing();
        if self.dim == 1 {
            [i0 as f64 * h, 0.0]
        } else {
            [i0 as f64 * h, i1 as f64 * h]
        }
    }

    /// Signed wavenumber of an FFT-ordered index along one axis.
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.points[0];
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// FFT-ordered index of a signed wavenumber, if representable.
    pub fn index_of_wavenumber(&self, k: i64) -> Option<usize> {
        let n = self.points[0] as i64;
        if k < -n / 2 || k >= n / 2 {
            return None;
        }
        Some(k.rem_euclid(n) as usize)
    }

    pub fn frequency(&self, idx: usize) -> Vec2 {
        let (i0, i1) = self.split(idx);
        let dk = self.dual_spacing();
        if self.dim == 1 {
            [self.wavenumber(i0) as f64 * dk, 0.0]
        } else {
            [self.wavenumber(i0) as f64 * dk, self.wavenumber(i1) as f64 * dk]
        }
    }

    pub fn points_iter(&self) -> impl Iterator<Item = Vec2> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    pub fn frequencies(&self) -> impl Iterator<Item = Vec2> + '_ {
        (0..self.len()).map(move |i| self.frequency(i))
    }

    /// Index of the frequency `ξ + θ` on the lattice, wrapping periodically.
    pub fn shifted_index(&self, xi: usize, theta: usize) -> usize {
        let n = self.points[0];
        let (a0, a1) = self.split(xi);
        let (b0, b1) = self.split(theta);
        if self.dim == 1 {
            (a0 + b0) % n
        } else {
            ((a0 + b0) % n) * n + (a1 + b1) % n
        }
    }

    /// Index of `ξ − θ`, wrapping periodically.
    pub fn difference_index(&self, xi: usize, theta: usize) -> usize {
        let n = self.points[0];
        let (a0, a1) = self.split(xi);
        let (b0, b1) = self.split(theta);
        if self.dim == 1 {
            (a0 + n - b0) % n
        } else {
            ((a0 + n - b0) % n) * n + (a1 + n - b1) % n
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_matches_two_pi_k_over_l() {
        let g = PeriodicGrid::new(1, 2.0 * PI * 8.0, 64).unwrap();
        let freqs: Vec<f64> = g.frequencies().map(|f| f[0]).collect();
        let mut ks: Vec<i64> = (0..64).map(|i| g.wavenumber(i)).collect();
        ks.sort();
        assert_eq!(ks.first(), Some(&-32));
        assert_eq!(ks.last(), Some(&31));
        for (i, f) in freqs.iter().enumerate() {
            assert!((f - g.wavenumber(i) as f64 / 8.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(PeriodicGrid::new(1, 1.0, 8).is_err());
        assert!(PeriodicGrid::new(1, 1.0, 48).is_err());
        assert!(PeriodicGrid::new(3, 1.0, 64).is_err());
        assert!(PeriodicGrid::new(1, 0.0, 64).is_err());
    }

    #[test]
    fn defaults() {
        let g1 = PeriodicGrid::default_for(1).unwrap();
        assert_eq!(g1.points(), 2048);
        assert!((g1.extent() - 16.0 * PI).abs() < 1e-12);
        let g2 = PeriodicGrid::default_for(2).unwrap();
        assert_eq!(g2.len(), 256 * 256);
    }

    #[test]
    fn wavenumber_index_roundtrip() {
        let g = PeriodicGrid::new(2, 1.0, 16).unwrap();
        for i in 0..16 {
            assert_eq!(g.index_of_wavenumber(g.wavenumber(i)), Some(i));
        }
        assert_eq!(g.index_of_wavenumber(8), None);
    }
}
