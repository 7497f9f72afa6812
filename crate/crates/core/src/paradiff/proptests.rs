use proptest::prelude::*;
use std::f64::consts::PI;

use super::*;
use crate::spectral::{lp_block, norm, CutoffProfile, PeriodicGrid, SpectralField, C64};

fn grid() -> PeriodicGrid {
    PeriodicGrid::new(1, 2.0 * PI, 256).unwrap()
}

fn field(g: &PeriodicGrid, coeffs: &[(i64, f64, f64)]) -> SpectralField {
    let mut spec = vec![C64::new(0.0, 0.0); g.len()];
    for &(k, re, im) in coeffs {
        spec[g.index_of_wavenumber(k).unwrap()] += C64::new(re, im);
    }
    SpectralField::from_spectrum(g, spec).unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<(i64, f64, f64)>> {
    prop::collection::vec((-60i64..=60, -1.0..1.0f64, -1.0..1.0f64), 1..12)
}

fn rough_symbol(amps: [f64; 3]) -> SymbolField {
    SymbolField::new(
        move |x, xi| {
            let v = amps[0] * x[0].cos() + amps[1] * (4.0 * x[0]).sin() + amps[2] * (9.0 * x[0]).cos();
            C64::new(1.0 + v, 0.5 * v) * (1.0 + xi[0] * xi[0]).sqrt()
        },
        1.0,
        3.0,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn linear_in_u(c1 in coeffs(), c2 in coeffs(), s in -2.0..2.0f64, amps in prop::array::uniform3(-0.5..0.5f64)) {
        let g = grid();
        let a = rough_symbol(amps);
        let (u, v) = (field(&g, &c1), field(&g, &c2));
        let lhs = apply_paradiff(&a, &u.add(&v.scale(C64::new(s, 0.0)))).unwrap();
        let rhs = apply_paradiff(&a, &u).unwrap().add(&apply_paradiff(&a, &v).unwrap().scale(C64::new(s, 0.0)));
        prop_assert!(lhs.sub(&rhs).l2_norm() <= 1e-12 * (1.0 + rhs.l2_norm()));
    }

    #[test]
    fn linear_in_a(c in coeffs(), p in prop::array::uniform3(-0.5..0.5f64), q in prop::array::uniform3(-0.5..0.5f64)) {
        let g = grid();
        let u = field(&g, &c);
        let (a, b) = (rough_symbol(p), rough_symbol(q));
        let (a2, b2) = (a.clone(), b.clone());
        let sum = SymbolField::new(move |x, xi| a2.eval(x, xi) + b2.eval(x, xi), 1.0, 3.0);
        let lhs = apply_paradiff(&sum, &u).unwrap();
        let rhs = apply_paradiff(&a, &u).unwrap().add(&apply_paradiff(&b, &u).unwrap());
        prop_assert!(lhs.sub(&rhs).l2_norm() <= 1e-12 * (1.0 + rhs.l2_norm()));
    }

    #[test]
    fn block_output_stays_in_annulus(c in coeffs(), amps in prop::array::uniform3(-0.5..0.5f64), j in 2u32..5) {
        let g = grid();
        let u = field(&g, &c);
        let rho_u = crate::spectral::apply_real_multiplier(&u, |xi| CutoffProfile.rho(xi)).unwrap();
        let block = lp_block(&rho_u, j);
        prop_assume!(block.l2_norm() > 1e-8);
        let t = apply_paradiff(&rough_symbol(amps), &block).unwrap();
        let (lo, hi) = ((j as f64 - 2.0).exp2(), (j as f64 + 2.0).exp2());
        let (mut out, mut tot) = (0.0, 0.0);
        for (i, z) in t.spectrum().iter().enumerate() {
            let f = norm(g.frequency(i));
            tot += z.norm_sqr();
            if f < lo || f > hi { out += z.norm_sqr(); }
        }
        prop_assert!(out <= 1e-10 * tot);
    }

    #[test]
    fn chi_is_a_unit_interval_cutoff(t in -500.0..500.0f64, e in -500.0..500.0f64) {
        let v = chi_cutoff([t, 0.0], [e, 0.0]);
        prop_assert!((0.0..=1.0).contains(&v));
        if t.abs() <= EPS1 * (1.0 + e.abs()) { prop_assert_eq!(v, 1.0); }
        if t.abs() >= EPS2 * (1.0 + e.abs()) { prop_assert_eq!(v, 0.0); }
    }
}
