use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::spectral::{PeriodicGrid, SpectralField};

/// Dyadic index, semiclassical parameter and window of one frequency block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemiclassicalParams {
    j: u32,
    delta: f64,
    nu: f64,
    j0: u32,
}

impl SemiclassicalParams {
    pub const DEFAULT_DELTA: f64 = 0.4;
    pub const DEFAULT_J0: u32 = 4;

    /// `0 < δ ≤ 1/2`, `0 < ν ≤ 1 − δ`, `j ≥ j₀` with the default `j₀ = 4`.
    pub fn new(j: u32, delta: f64, nu: f64) -> Result<Self> {
        Self::with_j0(j, delta, nu, Self::DEFAULT_J0)
    }

    pub fn with_j0(j: u32, delta: f64, nu: f64, j0: u32) -> Result<Self> {
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(Error::InvalidInput(format!("δ must lie in (0, 1/2], got {delta}")));
        }
        if !(nu > 0.0 && nu <= 1.0 - delta + 1e-15) {
            return Err(Error::InvalidInput(format!("ν must lie in (0, 1−δ] = (0, {}], got {nu}", 1.0 - delta)));
        }
        if j < j0 {
            return Err(Error::InvalidInput(format!("dyadic index {j} is below j₀ = {j0}")));
        }
        Ok(Self { j, delta, nu, j0 })
    }

    /// `δ = 2/5`, `ν = 1 − δ`.
    pub fn standard(j: u32) -> Result<Self> {
        Self::new(j, Self::DEFAULT_DELTA, 1.0 - Self::DEFAULT_DELTA)
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn j0(&self) -> u32 {
        self.j0
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn h(&self) -> f64 {
        (-(self.j as f64)).exp2()
    }

    /// Semiclassical window length `h^δ`.
    pub fn window(&self) -> f64 {
        self.h().powf(self.delta)
    }

    /// Physical window length `h^{1/2+δ}`.
    pub fn time_window(&self) -> f64 {
        self.h().sqrt() * self.window()
    }

    /// Level `(j−3)δ` of the regularizing low-pass filter.
    pub fn smoothing_level(&self) -> f64 {
        (self.j as f64 - 3.0) * self.delta
    }

    /// Lattice with `8·2^j` points on `[0, 2π)`: Nyquist at `|hk| = 4`, the outer edge of `φ₁`.
    pub fn lattice(&self) -> PeriodicGrid {
        PeriodicGrid::new(1, 2.0 * std::f64::consts::PI, 8usize << self.j).expect("valid lattice")
    }
}

/// Transport field `V` of the quasilinear system, frozen in time.
#[derive(Clone, Debug, PartialEq)]
pub enum VelocityPreset {
    Zero,
    Constant(f64),
    /// `A sin(k x)`.
    Sine { amplitude: f64, wavenumber: u32 },
}

impl VelocityPreset {
    pub fn build(&self, grid: &PeriodicGrid) -> Result<SpectralField> {
        if grid.dim() != 1 {
            return Err(Error::InvalidInput("velocity presets are one-dimensional".into()));
        }
        Ok(match *self {
            Self::Zero => SpectralField::zeros(grid),
            Self::Constant(c) => SpectralField::from_real_fn(grid, |_| c),
            Self::Sine { amplitude, wavenumber } => {
                let w = wavenumber as f64 * grid.dual_spacing();
                SpectralField::from_real_fn(grid, |x| amplitude * (w * x[0]).sin())
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Self::Zero => true,
            Self::Constant(c) => c == 0.0,
            Self::Sine { amplitude, .. } => amplitude == 0.0,
        }
    }

    /// `sup |V|`.
    pub fn sup(&self) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::Constant(c) => c.abs(),
            Self::Sine { amplitude, .. } => amplitude.abs(),
        }
    }
}

impl fmt::Display for VelocityPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "zero"),
            Self::Constant(c) => write!(f, "constant({c})"),
            Self::Sine { amplitude, wavenumber: 1 } => write!(f, "sine({amplitude})"),
            Self::Sine { amplitude, wavenumber } => write!(f, "sine({amplitude},{wavenumber})"),
        }
    }
}

impl FromStr for VelocityPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |msg: &str| Error::InvalidInput(format!("velocity preset `{s}`: {msg}"));
        let (name, args) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], &s[i + 1..s.len() - 1]),
            Some(_) => return Err(bad("unbalanced parentheses")),
            None => (s, ""),
        };
        let nums: Vec<&str> = if args.trim().is_empty() { vec![] } else { args.split(',').map(str::trim).collect() };
        let real = |t: &str| -> Result<f64> {
            let v: f64 = t.parse().map_err(|_| bad("expected a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad("non-finite parameter"))
            }
        };
        match (name.trim(), nums.len()) {
            ("zero", 0) => Ok(Self::Zero),
            ("constant", 1) => Ok(Self::Constant(real(nums[0])?)),
            ("sine", 1) => Ok(Self::Sine { amplitude: real(nums[0])?, wavenumber: 1 }),
            ("sine", 2) => {
                let k: u32 = nums[1].parse().map_err(|_| bad("wavenumber must be a positive integer"))?;
                if k == 0 {
                    return Err(bad("wavenumber must be a positive integer"));
                }
                Ok(Self::Sine { amplitude: real(nums[0])?, wavenumber: k })
            }
            ("zero" | "constant" | "sine", _) => Err(bad("wrong number of parameters")),
            _ => Err(bad("unknown preset (expected zero, constant(c), sine(A[,k]))")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_ranges() {
        assert!(SemiclassicalParams::new(5, 0.0, 0.5).is_err());
        assert!(SemiclassicalParams::new(5, 0.6, 0.3).is_err());
        assert!(SemiclassicalParams::new(5, 0.4, 0.7).is_err());
        assert!(SemiclassicalParams::new(3, 0.4, 0.6).is_err());
        let p = SemiclassicalParams::standard(6).unwrap();
        assert_eq!(p.h(), 1.0 / 64.0);
        assert!((p.window() - 64f64.powf(-0.4)).abs() < 1e-15);
        assert!((p.smoothing_level() - 1.2).abs() < 1e-15);
    }

    #[test]
    fn window_endpoints_match_under_rescaling() {
        for j in 4..10 {
            let p = SemiclassicalParams::standard(j).unwrap();
            let t = p.h().powf(0.5 + p.delta());
            assert!((p.time_window() - t).abs() <= 1e-15 * t);
        }
    }

    #[test]
    fn velocity_presets_round_trip() {
        for s in ["zero", "constant(0.25)", "sine(1)", "sine(0.5,3)"] {
            let v: VelocityPreset = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        for s in ["sine()", "sine(1,0)", "wind(2)", "constant(a)", "constant(1"] {
            assert!(s.parse::<VelocityPreset>().is_err(), "{s}");
        }
    }
}
