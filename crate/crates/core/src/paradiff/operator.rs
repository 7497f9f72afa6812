use rayon::prelude::*;

use super::symbol::SymbolField;
use crate::error::{Error, Result};
use crate::util::fd::central_stencil;
use crate::spectral::{norm, CutoffProfile, PeriodicGrid, SpectralField, C64, Vec2};

/// `χ(θ, η) = 1` for `|θ| ≤ EPS1·(1+|η|)`.
pub const EPS1: f64 = 1.0 / 24.0;
/// `χ(θ, η) = 0` for `|θ| ≥ EPS2·(1+|η|)`.
pub const EPS2: f64 = 0.5;
/// Largest relative top-octave energy an operand may carry.
pub const ALIAS_TOLERANCE: f64 = 1e-20;

const CHUNKS: usize = 64;
/// Input coefficients below this fraction of the largest one are round-off and skipped.
const SPARSITY: f64 = 1e-16;

fn active_set(v: &[C64]) -> Vec<bool> {
    let cut = v.iter().fold(0.0f64, |m, c| m.max(c.norm())) * SPARSITY;
    v.iter().map(|c| c.norm() > cut).collect()
}

/// `Σ_k ψ_{k−3}(θ) φ_k(η)`.
pub fn chi_cutoff(theta: Vec2, eta: Vec2) -> f64 {
    let c = CutoffProfile;
    let r = norm(eta);
    // φ_k(η) ≠ 0 only for 2^{k-1} < |η| < 2^{k+1}
    let kmax = c.max_block(r) + 1;
    (0..=kmax)
        .map(|k| {
            let p = c.phi(eta, k);
            if p == 0.0 {
                0.0
            } else {
                p * c.psi_level(theta, k as f64 - 3.0)
            }
        })
        .sum()
}

pub fn aliasing_guard(u: &SpectralField) -> Result<()> {
    let e = u.top_octave_energy();
    if e > ALIAS_TOLERANCE {
        return Err(Error::Aliasing(e));
    }
    Ok(())
}

/// Lattice indices of frequencies with `|θ| < radius`; the whole lattice if the ball covers it.
fn ball(grid: &PeriodicGrid, radius: f64) -> Vec<usize> {
    let n = grid.points() as i64;
    let dk = grid.dual_spacing();
    let kmax = (radius / dk).floor() as i64;
    if kmax >= n / 2 {
        return (0..grid.len()).filter(|&i| norm(grid.frequency(i)) < radius).collect();
    }
    let wrap = |k: i64| k.rem_euclid(n) as usize;
    let mut out = Vec::new();
    if grid.dim() == 1 {
        for k in -kmax..=kmax {
            if (k as f64 * dk).abs() < radius {
                out.push(wrap(k));
            }
        }
    } else {
        for a in -kmax..=kmax {
            for b in -kmax..=kmax {
                if (a as f64 * dk).hypot(b as f64 * dk) < radius {
                    out.push(wrap(a) * n as usize + wrap(b));
                }
            }
        }
    }
    out
}

/// Frequency-pair weight and the `θ`-radius outside which it vanishes.
#[derive(Clone, Copy)]
enum Cutoff {
    Para,
    None,
}

impl Cutoff {
    fn radius(self, eta: Vec2) -> f64 {
        match self {
            Cutoff::Para => EPS2 * (1.0 + norm(eta)),
            Cutoff::None => f64::INFINITY,
        }
    }

    fn weight(self, theta: Vec2, eta: Vec2) -> f64 {
        match self {
            Cutoff::Para => chi_cutoff(theta, eta),
            Cutoff::None => 1.0,
        }
    }
}

/// `out(η+θ) += w(θ,η) â(θ,η) input(η)`, with the lattice sum wrapped periodically.
///
/// Work is split into fixed chunks of `η` and the partial sums are added in
/// chunk order, so the result does not depend on the thread count.
fn scatter(a: &SymbolField, grid: &PeriodicGrid, input: &[C64], cut: Cutoff) -> Vec<C64> {
    let n = grid.len();
    let mask = active_set(input);
    let active: Vec<usize> = (0..n).filter(|&i| mask[i]).collect();
    let chunk = active.len().div_ceil(CHUNKS).max(1);
    let partials: Vec<Vec<C64>> = active
        .par_chunks(chunk)
        .map(|etas| {
            let mut out = vec![C64::new(0.0, 0.0); n];
            for &ie in etas {
                let eta = grid.frequency(ie);
                let col = a.column(grid, eta);
                let r = cut.radius(eta);
                for it in ball(grid, r) {
                    let theta = grid.frequency(it);
                    let w = cut.weight(theta, eta);
                    if w != 0.0 {
                        out[grid.shifted_index(ie, it)] += col[it] * input[ie] * w;
                    }
                }
            }
            out
        })
        .collect();
    let mut out = vec![C64::new(0.0, 0.0); n];
    for p in partials {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    out
}

/// Conjugate transpose of [`scatter`]: `out(η) = Σ_θ w(θ,η) conj(â(θ,η)) v(η+θ)`.
fn gather(a: &SymbolField, grid: &PeriodicGrid, v: &[C64], cut: Cutoff, outer: impl Fn(Vec2) -> f64 + Sync) -> Vec<C64> {
    let mask = active_set(v);
    (0..grid.len())
        .into_par_iter()
        .map(|ie| {
            let eta = grid.frequency(ie);
            let o = outer(eta);
            if o == 0.0 {
                return C64::new(0.0, 0.0);
            }
            let hits: Vec<(usize, usize)> = ball(grid, cut.radius(eta))
                .into_iter()
                .map(|it| (it, grid.shifted_index(ie, it)))
                .filter(|&(_, t)| mask[t])
                .collect();
            if hits.is_empty() {
                return C64::new(0.0, 0.0);
            }
            let col = a.column(grid, eta);
            let mut s = C64::new(0.0, 0.0);
            for (it, t) in hits {
                let target = v[t];
                let w = cut.weight(grid.frequency(it), eta);
                if w != 0.0 {
                    s += col[it].conj() * target * w;
                }
            }
            s * o
        })
        .collect()
}

/// `T_a u`, the paradifferential quantization.
pub fn apply_paradiff(a: &SymbolField, u: &SpectralField) -> Result<SpectralField> {
    aliasing_guard(u)?;
    let grid = u.grid();
    let c = CutoffProfile;
    let input: Vec<C64> = u.spectrum().iter().enumerate().map(|(i, &v)| v * c.rho(grid.frequency(i))).collect();
    SpectralField::from_spectrum(grid, scatter(a, grid, &input, Cutoff::Para))
}

/// `(T_a)^* v`, the L² adjoint of [`apply_paradiff`] on the lattice.
pub fn apply_paradiff_adjoint(a: &SymbolField, v: &SpectralField) -> Result<SpectralField> {
    aliasing_guard(v)?;
    let grid = v.grid();
    let c = CutoffProfile;
    SpectralField::from_spectrum(grid, gather(a, grid, v.spectrum(), Cutoff::Para, |eta| c.rho(eta)))
}

/// `a(x, D)u = Σ_ξ a(x, ξ) û(ξ) e^{ix·ξ}` (Kohn–Nirenberg).
pub fn apply_pseudodiff(a: &SymbolField, u: &SpectralField) -> Result<SpectralField> {
    aliasing_guard(u)?;
    let grid = u.grid();
    SpectralField::from_spectrum(grid, scatter(a, grid, u.spectrum(), Cutoff::None))
}

/// `ψ(2^{-level} D_x) a`, with no restriction on the sign of `level`.
pub(crate) fn low_pass_symbol(a: &SymbolField, level: f64, grid: &PeriodicGrid) -> SymbolField {
    let base = a.clone();
    let g = grid.clone();
    let c = CutoffProfile;
    SymbolField::from_columns(
        grid,
        move |xi| {
            let col = base.column(&g, xi);
            col.iter().enumerate().map(|(i, &v)| v * c.psi_level(g.frequency(i), level)).collect()
        },
        a.order(),
        a.rho(),
    )
    .homogeneous(a.is_homogeneous())
}

/// `S_{level} a = ψ(2^{-level} D_x) a(·, ξ)` for each frequency, tabulated on `grid`.
pub fn smooth_symbol(a: &SymbolField, cutoff_level: f64, grid: &PeriodicGrid) -> Result<SymbolField> {
    if !(cutoff_level >= 0.0 && cutoff_level.is_finite()) {
        return Err(Error::InvalidInput(format!("cutoff level must be non-negative, got {cutoff_level}")));
    }
    Ok(low_pass_symbol(a, cutoff_level, grid))
}

/// Samples of `∂_ξ^α a(·, ξ)` on `grid` by high-order centered differences.
pub fn xi_derivative_samples(a: &SymbolField, grid: &PeriodicGrid, xi: Vec2, alpha: [usize; 2]) -> Vec<C64> {
    if alpha == [0, 0] {
        return a.samples(grid, xi);
    }
    let h = (norm(xi) / 20.0).max(1e-3);
    let mut acc = vec![C64::new(0.0, 0.0); grid.len()];
    for (o0, w0) in central_stencil(alpha[0], h) {
        for (o1, w1) in central_stencil(alpha[1], h) {
            let s = a.samples(grid, [xi[0] + o0 * h, xi[1] + o1 * h]);
            for (t, v) in acc.iter_mut().zip(s) {
                *t += v * (w0 * w1);
            }
        }
    }
    acc
}

/// Multi-indices with `|α| < rho` in `dim` dimensions, capped at second order.
fn multi_indices(dim: usize, rho: f64) -> Vec<[usize; 2]> {
    let mut out = Vec::new();
    for n in 0..=2usize {
        if (n as f64) >= rho {
            break;
        }
        for a0 in 0..=n {
            let a1 = n - a0;
            if dim == 1 && a1 > 0 {
                continue;
            }
            out.push([a0, a1]);
        }
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn x_derivative_column(col: &[C64], grid: &PeriodicGrid, alpha: [usize; 2]) -> Vec<C64> {
    col.iter()
        .enumerate()
        .map(|(i, &c)| {
            let th = grid.frequency(i);
            c * C64::new(0.0, th[0]).powu(alpha[0] as u32) * C64::new(0.0, th[1]).powu(alpha[1] as u32)
        })
        .collect()
}

/// `a♯b = Σ_{|α|<ρ} (−i)^{|α|}/α! ∂_ξ^α a ∂_x^α b`, tabulated on `grid`.
pub fn sharp(a: &SymbolField, b: &SymbolField, rho: f64, grid: &PeriodicGrid) -> SymbolField {
    let (a2, b2, g) = (a.clone(), b.clone(), grid.clone());
    let alphas = multi_indices(grid.dim(), rho);
    SymbolField::from_columns(
        grid,
        move |xi| {
            let bcol = b2.column(&g, xi);
            let mut acc = vec![C64::new(0.0, 0.0); g.len()];
            for &al in &alphas {
                let n = al[0] + al[1];
                let coef = C64::new(0.0, -1.0).powu(n as u32) / (factorial(al[0]) * factorial(al[1]));
                let da = xi_derivative_samples(&a2, &g, xi, al);
                let db = crate::spectral::inverse(&g, &x_derivative_column(&bcol, &g, al));
                for ((t, x), y) in acc.iter_mut().zip(da).zip(db) {
                    *t += coef * x * y;
                }
            }
            crate::spectral::forward(&g, &acc)
        },
        a.order() + b.order(),
        a.rho().min(b.rho()),
    )
}

/// `a* = Σ_{|α|<ρ} 1/(i^{|α|} α!) ∂_ξ^α ∂_x^α conj(a)`, tabulated on `grid`.
pub fn adjoint_symbol(a: &SymbolField, rho: f64, grid: &PeriodicGrid) -> SymbolField {
    let (a2, g) = (a.clone(), grid.clone());
    let alphas = multi_indices(grid.dim(), rho);
    SymbolField::from_columns(
        grid,
        move |xi| {
            let mut acc = vec![C64::new(0.0, 0.0); g.len()];
            for &al in &alphas {
                let n = al[0] + al[1];
                let coef = C64::new(0.0, -1.0).powu(n as u32) / (factorial(al[0]) * factorial(al[1]));
                let da: Vec<C64> = xi_derivative_samples(&a2, &g, xi, al).iter().map(|v| v.conj()).collect();
                let col = x_derivative_column(&crate::spectral::forward(&g, &da), &g, al);
                for (t, c) in acc.iter_mut().zip(col) {
                    *t += coef * c;
                }
            }
            acc
        },
        a.order(),
        a.rho(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn rel_err(a: &SpectralField, b: &SpectralField) -> f64 {
        a.sub(b).l2_norm() / b.l2_norm().max(1e-300)
    }

    fn random_field(g: &PeriodicGrid, kmax: i64, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = (0..g.len())
            .map(|i| {
                if g.wavenumber(i).abs() <= kmax {
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        SpectralField::from_spectrum(g, spec).unwrap()
    }

    /// Direct double sum over the lattice, each `â` by an explicit DFT.
    fn paradiff_direct(a: &SymbolField, u: &SpectralField) -> SpectralField {
        let g = u.grid();
        let n = g.points();
        let uh = u.spectrum();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (ie, &ue) in uh.iter().enumerate() {
            let eta = g.frequency(ie);
            let rho = CutoffProfile.rho(eta);
            if rho == 0.0 || ue.norm() == 0.0 {
                continue;
            }
            for (ix, o) in out.iter_mut().enumerate() {
                let xi = g.frequency(ix);
                let theta = [xi[0] - eta[0], 0.0];
                let chi = chi_cutoff(theta, eta);
                if chi == 0.0 {
                    continue;
                }
                let mut ah = C64::new(0.0, 0.0);
                for x in g.points_iter() {
                    ah += a.eval(x, eta) * C64::from_polar(1.0, -theta[0] * x[0]);
                }
                *o += chi * ah / n as f64 * rho * ue;
            }
        }
        SpectralField::from_spectrum(g, out).unwrap()
    }

    #[test]
    fn chi_bands() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..4000 {
            let eta = [rng.gen_range(-300.0..300.0), 0.0];
            let s = 1.0 + norm(eta);
            let inner = [EPS1 * s * rng.gen_range(0.0..1.0), 0.0];
            let outer = [EPS2 * s * rng.gen_range(1.0..4.0), 0.0];
            assert_eq!(chi_cutoff(inner, eta), 1.0, "η={eta:?} θ={inner:?}");
            assert_eq!(chi_cutoff(outer, eta), 0.0, "η={eta:?} θ={outer:?}");
            let v = chi_cutoff([rng.gen_range(-200.0..200.0), 0.0], eta);
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn chi_examples() {
        for r in [1.0, 1.7, 2.0, 40.0, 1000.0] {
            assert_eq!(chi_cutoff([0.0, 0.0], [r, 0.0]), 1.0);
            assert_eq!(chi_cutoff([4.0 * (1.0 + r), 0.0], [r, 0.0]), 0.0);
        }
        let g = PeriodicGrid::new(1, 2.0 * PI * 8.0, 2048).unwrap();
        for xi in g.frequencies().filter(|x| norm(*x) >= 1.0) {
            assert_eq!(chi_cutoff([0.0, 0.0], xi), 1.0);
        }
    }

    #[test]
    fn constant_symbol_gives_rho_of_d() {
        let g = PeriodicGrid::new(1, 2.0 * PI * 8.0, 512).unwrap();
        let u = random_field(&g, 120, 1);
        let t = apply_paradiff(&SymbolField::constant(2.5), &u).unwrap();
        let want = crate::spectral::apply_real_multiplier(&u, |xi| 2.5 * CutoffProfile.rho(xi)).unwrap();
        assert!(rel_err(&t, &want) <= 1e-12);
    }

    #[test]
    fn homogeneous_symbol_on_plateau_mode() {
        let g = PeriodicGrid::new(1, 2.0 * PI, 256).unwrap();
        let a = SymbolField::real(|_, xi| norm(xi).powf(1.5), 1.5, 0.0);
        let u = SpectralField::mode(&g, [16, 0], C64::new(1.0, 0.0));
        let t = apply_paradiff(&a, &u).unwrap();
        assert!(rel_err(&t, &u.scale(C64::new(64.0, 0.0))) <= 1e-10);
    }

    #[test]
    fn block_route_matches_direct_double_sum() {
        let g = PeriodicGrid::new(1, 2.0 * PI, 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c: Vec<(f64, f64)> = (0..3).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.0..6.0))).collect();
        let a = SymbolField::new(
            move |x, xi| {
                let v: f64 = c.iter().enumerate().map(|(k, (amp, ph))| amp * ((k + 1) as f64 * x[0] + ph).cos()).sum();
                C64::new(1.0 + v, 0.3 * v) * (1.0 + xi[0] * xi[0]).powf(0.75)
            },
            1.5,
            4.0,
        );
        let u = random_field(&g, 15, 2);
        let fast = apply_paradiff(&a, &u).unwrap();
        let slow = paradiff_direct(&a, &u);
        assert!(rel_err(&fast, &slow) < 1e-10, "{}", rel_err(&fast, &slow));
    }

    #[test]
    fn adjoint_is_conjugate_transpose() {
        let g = PeriodicGrid::new(1, 2.0 * PI, 128).unwrap();
        let a = SymbolField::new(|x, xi| C64::new((2.0 * x[0]).sin(), 1.0 + x[0].cos()) * xi[0], 1.0, 3.0);
        let u = random_field(&g, 30, 3);
        let v = random_field(&g, 30, 4);
        let lhs = apply_paradiff(&a, &u).unwrap().inner(&v);
        let rhs = u.inner(&apply_paradiff_adjoint(&a, &v).unwrap());
        assert!((lhs - rhs).norm() < 1e-11 * lhs.norm().max(1.0));
    }

    #[test]
    fn pseudodiff_examples() {
        let l = 2.0 * PI * 4.0;
        let g = PeriodicGrid::new(1, l, 256).unwrap();
        let u = random_field(&g, 60, 6);
        let id = apply_pseudodiff(&SymbolField::constant(1.0), &u).unwrap();
        assert!(rel_err(&id, &u) <= 1e-12);

        let w = 2.0 * PI / l;
        let v = SpectralField::from_real_fn(&g, |x| 1.0 + 0.5 * (3.0 * w * x[0]).sin());
        let vv = v.clone();
        let a = SymbolField::new(move |x, xi| C64::new(0.0, xi[0]) * (1.0 + 0.5 * (3.0 * w * x[0]).sin()), 1.0, 10.0);
        let want = vv.mul(&u.derivative(0));
        assert!(rel_err(&apply_pseudodiff(&a, &u).unwrap(), &want) <= 1e-12);

        let cosx = SymbolField::real(move |x, _| (w * x[0]).cos(), 0.0, 10.0);
        let m = SpectralField::mode(&g, [7, 0], C64::new(1.0, 0.0));
        let want = SpectralField::mode(&g, [8, 0], C64::new(0.5, 0.0)).add(&SpectralField::mode(&g, [6, 0], C64::new(0.5, 0.0)));
        assert!(rel_err(&apply_pseudodiff(&cosx, &m).unwrap(), &want) <= 1e-12);
    }

    #[test]
    fn pseudodiff_matches_pointwise_sum() {
        let g = PeriodicGrid::new(1, 2.0 * PI, 64).unwrap();
        let a = SymbolField::new(|x, xi| C64::new(x[0].sin().abs(), 0.2) * (1.0 + xi[0].abs()), 1.0, 1.0);
        let u = random_field(&g, 15, 8);
        let fast = apply_pseudodiff(&a, &u).unwrap();
        let uh = u.spectrum();
        for (ix, x) in g.points_iter().enumerate() {
            let mut s = C64::new(0.0, 0.0);
            for (ie, c) in uh.iter().enumerate() {
                let xi = g.frequency(ie);
                s += a.eval(x, xi) * c * C64::from_polar(1.0, xi[0] * x[0]);
            }
            assert!((fast.values()[ix] - s).norm() < 1e-11);
        }
    }

    #[test]
    fn aliasing_guard_rejects_top_octave() {
        let g = PeriodicGrid::new(1, 2.0 * PI, 64).unwrap();
        let u = SpectralField::mode(&g, [20, 0], C64::new(1.0, 0.0));
        let a = SymbolField::constant(1.0);
        assert!(matches!(apply_paradiff(&a, &u), Err(Error::Aliasing(_))));
        assert!(matches!(apply_pseudodiff(&a, &u), Err(Error::Aliasing(_))));
    }

    #[test]
    fn smoothing_examples() {
        let g = PeriodicGrid::new(1, 2.0 * PI, 128).unwrap();
        let flat = SymbolField::real(|_, xi| norm(xi).powf(1.5), 1.5, 0.0).homogeneous(true);
        let s = smooth_symbol(&flat, 2.0, &g).unwrap();
        assert!(s.is_homogeneous());
        for x in [0.0, 1.0, 4.0] {
            assert!((s.eval([x, 0.0], [3.0, 0.0]) - flat.eval([x, 0.0], [3.0, 0.0])).norm() < 1e-12);
        }
        let low = SymbolField::real(|x, xi| (4.0 * x[0]).cos() * xi[0], 1.0, 5.0);
        let s = smooth_symbol(&low, 2.0, &g).unwrap();
        let high = SymbolField::real(|x, xi| (16.0 * x[0]).cos() * xi[0], 1.0, 5.0);
        let z = smooth_symbol(&high, 2.0, &g).unwrap();
        for x in [0.0, 0.4, 2.5] {
            assert!((s.eval([x, 0.0], [2.0, 0.0]) - low.eval([x, 0.0], [2.0, 0.0])).norm() < 1e-12);
            assert!(z.eval([x, 0.0], [2.0, 0.0]).norm() < 1e-12);
        }
        assert!(smooth_symbol(&flat, -1.0, &g).is_err());
    }

    #[test]
    fn smoothing_is_idempotent_off_the_transition_band() {
        // ψ(2^{-3}k) ∈ {0, 1} at k = 2, 5, 17, 30; the ramp 8 < |k| < 16 is avoided.
        let g = PeriodicGrid::new(1, 2.0 * PI, 128).unwrap();
        let a = SymbolField::real(
            |x, xi| (1.0 + 0.3 * (2.0 * x[0]).cos() + 0.2 * (5.0 * x[0]).sin() + 0.1 * (17.0 * x[0]).cos() - 0.1 * (30.0 * x[0]).sin()) * xi[0],
            1.0,
            5.0,
        );
        let once = smooth_symbol(&a, 3.0, &g).unwrap();
        let twice = smooth_symbol(&once, 3.0, &g).unwrap();
        for x in [0.0, 0.7, 3.3] {
            assert!((once.eval([x, 0.0], [5.0, 0.0]) - twice.eval([x, 0.0], [5.0, 0.0])).norm() < 1e-12);
        }
    }

    #[test]
    fn sharp_of_linear_symbol() {
        // a = iξ, b = W(x)|ξ|: a♯b = iξ W|ξ| + W′|ξ|.
        let g = PeriodicGrid::new(1, 2.0 * PI, 64).unwrap();
        let a = SymbolField::new(|_, xi| C64::new(0.0, xi[0]), 1.0, 10.0);
        let b = SymbolField::real(|x, xi| (3.0 * x[0]).sin() * xi[0].abs(), 1.0, 10.0);
        let s = sharp(&a, &b, 2.0, &g);
        for (x, xi) in [(0.3f64, 2.0f64), (1.9, -5.0)] {
            let want = C64::new(3.0 * (3.0 * x).cos() * xi.abs(), xi * (3.0 * x).sin() * xi.abs());
            assert!((s.eval([x, 0.0], [xi, 0.0]) - want).norm() < 1e-9);
        }
    }

    #[test]
    fn adjoint_symbol_of_transport() {
        // a = iVξ ⇒ a* = −iVξ − V′.
        let g = PeriodicGrid::new(1, 2.0 * PI, 64).unwrap();
        let a = SymbolField::new(|x, xi| C64::new(0.0, (2.0 * x[0]).cos() * xi[0]), 1.0, 10.0);
        let s = adjoint_symbol(&a, 2.0, &g);
        for (x, xi) in [(0.3f64, 2.0f64), (1.9, -5.0)] {
            let want = C64::new(2.0 * (2.0 * x).sin(), -(2.0 * x).cos() * xi);
            assert!((s.eval([x, 0.0], [xi, 0.0]) - want).norm() < 1e-9);
        }
    }
}
