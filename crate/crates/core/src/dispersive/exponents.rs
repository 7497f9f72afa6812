//! Exact exponent arithmetic linking the window length to the Strichartz loss.

use num_rational::Ratio;

use crate::error::{Error, Result};

pub type Q = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExponentRecord {
    pub delta: Q,
    /// `ς = 1/2 + δ`, the window exponent in physical time.
    pub varsigma: Q,
    /// `(3/2)(1 − δ)`, the exponent balancing the residual against the window.
    pub balance: Q,
    /// Whether the two agree, which happens exactly at `δ = 2/5`.
    pub coincide: bool,
    /// `3/8 − ς/4`.
    pub mu_one_dim: Q,
    /// `3/4 − ς/2`.
    pub mu_higher_dim: Q,
    /// The source term is measured in `H^{s − ς}`.
    pub source_offset: Q,
}

fn q(n: i64, d: i64) -> Q {
    Ratio::new(n, d)
}

pub fn exponent_consistency(delta: Q) -> Result<ExponentRecord> {
    if !(delta > q(0, 1) && delta <= q(1, 2)) {
        return Err(Error::InvalidInput(format!("δ = {delta} outside (0, 1/2]")));
    }
    let varsigma = q(1, 2) + delta;
    let balance = q(3, 2) * (q(1, 1) - delta);
    Ok(ExponentRecord {
        delta,
        varsigma,
        balance,
        coincide: varsigma == balance,
        mu_one_dim: q(3, 8) - varsigma / 4,
        mu_higher_dim: q(3, 4) - varsigma / 2,
        source_offset: varsigma,
    })
}
