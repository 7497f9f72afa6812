//! Smooth cutoffs built from the `exp(-1/t)` transition.
//!
//! Every profile here is a product of [`smooth_step`] ramps, so each one is
//! `C^∞` with exact plateaus and exact zeros.

use super::grid::{norm, Vec2};

fn flat(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// 0 for `t ≤ 0`, 1 for `t ≥ 1`, smooth in between.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = flat(t);
    a / (a + flat(1.0 - t))
}

/// 1 on `[b, c]`, 0 outside `(a, d)`, for `0 ≤ a < b ≤ c < d`.
pub fn band(r: f64, a: f64, b: f64, c: f64, d: f64) -> f64 {
    smooth_step((r - a) / (b - a)) * (1.0 - smooth_step((r - c) / (d - c)))
}

/// The radial plateau profile: 1 for `r ≤ 1`, 0 for `r ≥ 2`.
pub fn psi_radial(r: f64) -> f64 {
    1.0 - smooth_step(r - 1.0)
}

/// Dyadic cutoffs of the Littlewood–Paley decomposition, plus `ϱ` and the annulus cutoff `φ₁`.
#[derive(Clone, Copy, Debug, Default)]
pub struct CutoffProfile;

impl CutoffProfile {
    pub fn psi(&self, theta: Vec2) -> f64 {
        psi_radial(norm(theta))
    }

    /// `ψ(2^{-level} θ)`; `level` may be fractional or negative.
    pub fn psi_level(&self, theta: Vec2, level: f64) -> f64 {
        psi_radial(norm(theta) * (-level).exp2())
    }

    /// `φ₀ = ψ`, `φ_k = ψ_k − ψ_{k−1}`.
    pub fn phi(&self, xi: Vec2, k: u32) -> f64 {
        let r = norm(xi);
        if k == 0 {
            return psi_radial(r);
        }
        let s = (-(k as f64)).exp2();
        psi_radial(r * s) - psi_radial(2.0 * r * s)
    }

    /// `ϱ`: 0 for `|ξ| ≤ 1/2`, 1 for `|ξ| ≥ 1`.
    pub fn rho(&self, xi: Vec2) -> f64 {
        1.0 - psi_radial(2.0 * norm(xi))
    }

    /// Annulus cutoff, 1 on `1/3 ≤ |ξ| ≤ 3`, supported in `1/4 ≤ |ξ| ≤ 4`.
    pub fn phi_one(&self, xi: Vec2) -> f64 {
        annulus_radial(norm(xi))
    }

    /// Largest `k` whose block `φ_k` meets `{|ξ| ≤ radius}`.
    pub fn max_block(&self, radius: f64) -> u32 {
        if radius < 1.0 {
            return 0;
        }
        // φ_k is supported in 2^{k-1} ≤ |ξ| ≤ 2^{k+1}
        (radius.log2().floor() as u32) + 1
    }
}

pub fn annulus_radial(r: f64) -> f64 {
    band(r, 0.25, 1.0 / 3.0, 3.0, 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_plateau_and_support() {
        let c = CutoffProfile;
        for i in 0..=100 {
            let r = i as f64 / 100.0;
            assert_eq!(c.psi([r, 0.0]), 1.0);
            assert_eq!(c.psi([2.0 + r, 0.0]), 0.0);
        }
        let mut prev = 1.0;
        for i in 1..100 {
            let r = 1.0 + i as f64 / 100.0;
            let v = c.psi([r, 0.0]);
            assert!((0.0..=1.0).contains(&v) && v <= prev);
            prev = v;
        }
        assert!(c.psi([1.5, 0.0]) > 0.4 && c.psi([1.5, 0.0]) < 0.6);
    }

    #[test]
    fn telescoping_partition() {
        let c = CutoffProfile;
        for i in 0..400 {
            let r = i as f64 * 0.37;
            for kk in 0..8u32 {
                let sum: f64 = (0..=kk).map(|k| c.phi([r, 0.0], k)).sum();
                let target = c.psi_level([r, 0.0], kk as f64);
                assert!((sum - target).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn phi_one_bands() {
        let c = CutoffProfile;
        for i in 0..=200 {
            let r = 1.0 / 3.0 + (3.0 - 1.0 / 3.0) * i as f64 / 200.0;
            assert_eq!(c.phi_one([r, 0.0]), 1.0);
        }
        for r in [0.0, 0.1, 0.25, 4.0, 5.0, 100.0] {
            assert_eq!(c.phi_one([r, 0.0]), 0.0);
        }
    }

    #[test]
    fn rho_bands() {
        let c = CutoffProfile;
        assert_eq!(c.rho([0.5, 0.0]), 0.0);
        assert_eq!(c.rho([0.2, 0.1]), 0.0);
        assert_eq!(c.rho([1.0, 0.0]), 1.0);
        assert_eq!(c.rho([0.0, 7.0]), 1.0);
    }

    #[test]
    fn phi_k_equals_one_only_at_dyadic_radius() {
        let c = CutoffProfile;
        assert_eq!(c.phi([8.0, 0.0], 3), 1.0);
        assert!(c.phi([7.0, 0.0], 3) < 1.0);
        assert_eq!(c.phi([16.0, 0.0], 3), 0.0);
        assert_eq!(c.phi([4.0, 0.0], 3), 0.0);
    }
}
