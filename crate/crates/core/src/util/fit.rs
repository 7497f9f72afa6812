use crate::error::{Error, Result};

/// Least-squares line `y ≈ intercept + slope·x`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
    pub points: usize,
}

pub fn linear_fit(x: &[f64], y: &[f64], min_points: usize) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput("fit abscissa and ordinate lengths differ".into()));
    }
    let n = x.len();
    if n < min_points.max(2) {
        return Err(Error::Degenerate(format!("{n} points, at least {} required", min_points.max(2))));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("non-finite sample in fit".into()));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all abscissae coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum::<f64>() / nf).sqrt();
    Ok(LinearFit { slope, intercept, residual, points: n })
}

/// Fit of `log₂ y` against `x`.
pub fn log2_fit(x: &[f64], y: &[f64], min_points: usize) -> Result<LinearFit> {
    if y.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Degenerate("log fit needs positive ordinates".into()));
    }
    let ly: Vec<f64> = y.iter().map(|v| v.log2()).collect();
    linear_fit(x, &ly, min_points)
}

/// Samples `(x_i, y_i)` together with the least-squares line through `(x_i, log₂ y_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    pub abscissae: Vec<f64>,
    pub values: Vec<f64>,
    pub fit: LinearFit,
}

impl DecayFit {
    pub fn new(abscissae: Vec<f64>, values: Vec<f64>, min_points: usize) -> Result<Self> {
        let fit = log2_fit(&abscissae, &values, min_points)?;
        Ok(Self { abscissae, values, fit })
    }

    pub fn slope(&self) -> f64 {
        self.fit.slope
    }
}
