use num_complex::Complex64;
use opdam::convolution::{g_quantity, in_triangle};
use opdam::ops::apply_t;
use opdam::special::{c_abs_sq_inverse, jacobi_phi, opdam_g, plancherel_densities};
use opdam::transform::{forward, jacobi_relation};
use opdam::{GridFunction, Parameters, SpatialGrid};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = Parameters> {
    (-0.45f64..2.5, -0.45f64..1.5)
        .prop_filter("alpha >= beta", |(a, b)| a >= b)
        .prop_map(|(a, b)| Parameters::new(a, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn g_is_one_at_origin(p in params(), l in -20.0f64..20.0, eta in -1.0f64..1.0) {
        let v = opdam_g(&p, Complex64::new(l, eta), 0.0).unwrap();
        prop_assert!((v - 1.0).norm() < 1e-12);
    }

    #[test]
    fn phi_is_even(p in params(), l in 0.0f64..15.0, x in 0.01f64..4.0) {
        let a = jacobi_phi(&p, Complex64::new(l, 0.0), x).unwrap();
        let b = jacobi_phi(&p, Complex64::new(-l, 0.0), -x).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1e-3));
    }

    #[test]
    fn g_conjugate_symmetry(p in params(), l in 0.0f64..15.0, x in -4.0f64..4.0) {
        // G_{-l}(x) = conj G_l(x) for real l
        let a = opdam_g(&p, Complex64::new(l, 0.0), x).unwrap();
        let b = opdam_g(&p, Complex64::new(-l, 0.0), x).unwrap();
        prop_assert!((a.conj() - b).norm() <= 1e-10 * a.norm().max(1e-3));
    }

    #[test]
    fn eigen_equation(p in params(), l in 0.1f64..8.0, x in 0.2f64..3.0, sign in prop::bool::ANY) {
        let x = if sign { x } else { -x };
        let lam = Complex64::new(l, 0.0);
        let g = |t: f64| opdam_g(&p, lam, t).unwrap();
        let t = apply_t(&g, &p, x, 1e-3).unwrap();
        prop_assert!((t - Complex64::new(0.0, l) * g(x)).norm() < 1e-6 * (1.0 + l));
    }

    #[test]
    fn densities_are_consistent(p in params(), l in 0.05f64..30.0) {
        let d = plancherel_densities(&p, l);
        prop_assert!(d.symmetric > 0.0);
        prop_assert!((d.asymmetric.norm() - d.asymmetric_modulus).abs() <= 1e-12 * d.asymmetric_modulus);
        prop_assert!(c_abs_sq_inverse(&p, l) > 0.0);
    }

    #[test]
    fn g_quantity_is_symmetric(x in -2.0f64..2.0, y in -2.0f64..2.0, z in -2.0f64..2.0, chi in 0.0f64..3.14) {
        let a = g_quantity(x, y, z, chi);
        for b in [g_quantity(y, x, z, chi), g_quantity(z, y, x, chi), g_quantity(-x, -y, -z, chi)] {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
        prop_assert_eq!(in_triangle(x, y, z), in_triangle(y, z, x));
    }
}

#[test]
fn jacobi_relation_matches_forward() {
    let grid = SpatialGrid::new(8.0, 1601).unwrap();
    let f = GridFunction::from_real_fn(grid, |x| (-x * x).exp() * (1.0 + 0.5 * x + 0.2 * x * x));
    for (a, b) in [(0.5, -0.5), (1.0, 0.25)] {
        let p = Parameters::new(a, b).unwrap();
        for l in [0.3, 1.7, 4.0] {
            let lam = Complex64::new(l, 0.0);
            let direct = forward(&p, &f, lam).unwrap();
            let via = jacobi_relation(&p, &f, lam).unwrap();
            assert!((direct - via).norm() < 1e-6 * direct.norm().max(1e-3), "({a},{b}) l = {l}: {direct} vs {via}");
        }
    }
}
