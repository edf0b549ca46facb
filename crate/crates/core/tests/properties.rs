use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use proptest::prelude::*;

use tpms_oh::solver::balance::balance_residual;
use tpms_oh::special_fn::carlson::{rd, rf};
use tpms_oh::special_fn::{ell_e, ell_ebar, ell_k, ell_kbar, Lattice, RhombicTorus};
use tpms_oh::weierstrass_data::{simplify, unsimplify, SurfaceParams};

fn lattice(r: f64, phi: f64, ratio: f64, angle: f64) -> (Lattice, Complex64, Complex64) {
    let t1 = Complex64::from_polar(r, phi);
    let t2 = t1 * Complex64::from_polar(ratio, angle);
    (Lattice::new(t1, t2).unwrap(), t1, t2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn carlson_homogeneity_and_symmetry(x in 0.01..10.0f64, y in 0.01..10.0f64, z in 0.01..10.0f64, s in 0.1..10.0f64) {
        let f = rf(x, y, z).unwrap();
        prop_assert!((rf(s * x, s * y, s * z).unwrap() - f / s.sqrt()).abs() <= 1e-14 * f / s.sqrt());
        prop_assert!((rf(z, x, y).unwrap() - f).abs() <= 1e-14 * f);
        let d = rd(x, y, z).unwrap();
        prop_assert!((rd(s * x, s * y, s * z).unwrap() - d / s.powf(1.5)).abs() <= 1e-13 * d / s.powf(1.5));
        prop_assert!((rd(y, x, z).unwrap() - d).abs() <= 1e-14 * d);
    }

    #[test]
    fn legendre_relation_for_complete_integrals(m in 0.001..0.999f64) {
        let (k, e, kb, eb) = (ell_k(m).unwrap(), ell_e(m).unwrap(), ell_kbar(m).unwrap(), ell_ebar(m).unwrap());
        prop_assert!((e * kb + eb * k - k * kb - FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn weierstrass_parity_and_derivative(
        r in 0.5..2.0f64, phi in -0.5..0.5f64, ratio in 0.6..1.8f64, angle in 0.4..2.7f64,
        u in 0.1..0.9f64, v in 0.1..0.9f64,
    ) {
        let (l, t1, t2) = lattice(r, phi, ratio, angle);
        let z = t1 * u + t2 * v;
        let (wp, ze) = (l.wp(z).unwrap(), l.zeta(z).unwrap());
        prop_assert!((l.wp(-z).unwrap() - wp).norm() <= 1e-12 * wp.norm().max(1.0));
        prop_assert!((l.zeta(-z).unwrap() + ze).norm() <= 1e-12 * ze.norm().max(1.0));
        // ℘ = −ζ′, central difference along a complex direction
        let h = Complex64::from_polar(1e-4, 0.7);
        let dz = (l.zeta(z + h).unwrap() - l.zeta(z - h).unwrap()) / (2.0 * h);
        prop_assert!((dz + wp).norm() <= 1e-6 * wp.norm().max(1.0));
    }

    #[test]
    fn half_point_is_always_balanced(theta in 0.3..2.8f64) {
        let torus = RhombicTorus::new(theta).unwrap();
        prop_assert!(balance_residual(0.5, &torus).unwrap().abs() < 1e-12);
    }

    #[test]
    fn simplify_round_trip(a in 0.3..5.0f64, db in 0.01..3.0f64, dt in 0.01..5.0f64, rho in 0.5..2.0f64) {
        let b = (1.0 / a).max(a * 0.5) + db;
        let t = a.max(b) + dt;
        let p = SurfaceParams::new(a, b, t, rho).unwrap();
        let back = unsimplify(&simplify(&p).unwrap(), rho).unwrap();
        for (x, y) in [(p.a, back.a), (p.b, back.b), (p.t, back.t)] {
            prop_assert!((x - y).abs() <= 1e-13 * x);
        }
    }
}
