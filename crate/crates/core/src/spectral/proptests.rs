use proptest::prelude::*;
use std::f64::consts::PI;

use super::*;

fn field_from(grid: &PeriodicGrid, coeffs: &[(i64, f64, f64)]) -> SpectralField {
    let mut spec = vec![C64::new(0.0, 0.0); grid.len()];
    for &(k, re, im) in coeffs {
        if let Some(i) = grid.index_of_wavenumber(k) {
            spec[i] += C64::new(re, im);
        }
    }
    SpectralField::from_spectrum(grid, spec).unwrap()
}

fn coeffs(kmax: i64) -> impl Strategy<Value = Vec<(i64, f64, f64)>> {
    prop::collection::vec((-kmax..=kmax, -1.0..1.0f64, -1.0..1.0f64), 1..24)
}

fn grid() -> PeriodicGrid {
    PeriodicGrid::new(1, 2.0 * PI * 8.0, 512).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn multiplier_composition(c in coeffs(200), a in 0.1..3.0f64, b in -2.0..2.0f64) {
        let g = grid();
        let u = field_from(&g, &c);
        let m1 = |xi: Vec2| C64::new((a * xi[0]).cos(), b * xi[0]);
        let m2 = |xi: Vec2| C64::new(1.0 + xi[0] * xi[0], 0.0).powf(-0.5);
        let lhs = apply_multiplier(&apply_multiplier(&u, m1).unwrap(), m2).unwrap();
        let rhs = apply_multiplier(&u, |xi| m1(xi) * m2(xi)).unwrap();
        let err = lhs.sub(&rhs).l2_norm() / rhs.l2_norm().max(1e-300);
        prop_assert!(err <= 1e-12, "composition error {}", err);
    }

    #[test]
    fn almost_orthogonality(c in coeffs(255), j in 0u32..6, gap in 2u32..4) {
        let g = grid();
        let u = field_from(&g, &c);
        let k = j + gap;
        let v = lp_block(&lp_block(&u, j), k);
        prop_assert!(v.max_abs() <= 1e-12);
    }

    #[test]
    fn bernstein_bound(c in coeffs(255), k in 1u32..5) {
        let g = grid();
        let u = low_pass(&field_from(&g, &c), k as f64 - 1.0);
        let grad = u.derivative(0);
        prop_assert!(grad.max_abs() <= (k as f64 + 1.0).exp2() * u.max_abs() + 1e-12);
    }

    #[test]
    fn zygmund_monotone_in_order(c in coeffs(255), s1 in 0.0..2.0f64, ds in 0.0..2.0f64) {
        let g = grid();
        let u = apply_real_multiplier(&field_from(&g, &c), |xi| CutoffProfile.rho(xi)).unwrap();
        prop_assert!(zygmund_norm(&u, s1) <= zygmund_norm(&u, s1 + ds) * (1.0 + 1e-14));
    }

    #[test]
    fn sobolev_triangle(a in coeffs(200), b in coeffs(200), s in -1.0..2.0f64) {
        let g = grid();
        let u = field_from(&g, &a);
        let v = field_from(&g, &b);
        let lhs = sobolev_norm(&u.add(&v), s);
        prop_assert!(lhs <= sobolev_norm(&u, s) + sobolev_norm(&v, s) + 1e-12);
    }
}
