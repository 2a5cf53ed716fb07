use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use cmc_torus::fourier::{FourierField, ModeIndex};
use cmc_torus::revolution::{clifford_profile, conformal_class, surface_data, willmore_energy, Profile};
use cmc_torus::spectrum::{e_value, eigenvalue, morse_index, prefactor, sign_factor};
use cmc_torus::tensor::{c_constant, c_from_poisson, d_divergence, d_trace, FlatMetric};
use cmc_torus::torus::{geometric_data, make_torus, willmore_energy_clifford};
use cmc_torus::verify::{fd_divergence_variation, fd_trace_variation, random_tensor};

fn radius() -> impl Strategy<Value = f64> {
    1e-3..(1.0 - 1e-3)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn torus_relations(r in radius()) {
        let t = make_torus(r).unwrap();
        let g = geometric_data(&t);
        prop_assert!((t.r2() + t.s2() - 1.0).abs() <= 1e-15);
        prop_assert!(close(g.h, g.a11 + g.a22, 1e-12));
        prop_assert!(close(g.h, -geometric_data(&t.swapped()).h, 1e-12));
        prop_assert!(willmore_energy_clifford(&t) >= 2.0 * PI * PI * (1.0 - 1e-15));
    }

    #[test]
    fn zero_modes_vanish(r in radius()) {
        let t = make_torus(r).unwrap();
        for (k, l) in [(1, 0), (0, 1), (1, 1)] {
            prop_assert_eq!(e_value(&t, k, l).unwrap(), 0.0);
        }
    }

    #[test]
    fn doubly_nonzero_modes_are_nonnegative(r in radius(), k in 1u32..12, l in 1u32..12) {
        let e = e_value(&make_torus(r).unwrap(), k, l).unwrap();
        prop_assert!(e >= 0.0);
        prop_assert_eq!(e == 0.0, (k, l) == (1, 1));
    }

    #[test]
    fn sign_follows_sign_factor(r in radius(), k in 0u32..12, l in 0u32..12) {
        prop_assume!((k, l) != (0, 0));
        let t = make_torus(r).unwrap();
        let e = e_value(&t, k, l).unwrap();
        prop_assert!(prefactor(&t, k, l) >= 0.0);
        if prefactor(&t, k, l) > 0.0 {
            prop_assert_eq!(e.signum() == -1.0, sign_factor(&t, k, l) < 0.0);
        }
    }

    #[test]
    fn spectrum_swap_symmetry(r in radius(), k in 0u32..10, l in 0u32..10) {
        prop_assume!((k, l) != (0, 0));
        let t = make_torus(r).unwrap();
        let a = e_value(&t, k, l).unwrap();
        let b = e_value(&t.swapped(), l, k).unwrap();
        prop_assert!(close(a, b, 1e-11));
    }

    #[test]
    fn operator_symbol_is_half_of_e(r in 0.02f64..0.98, k in 0u32..10, l in 0u32..10) {
        prop_assume!((k, l) != (0, 0));
        let s = eigenvalue(&make_torus(r).unwrap(), ModeIndex::new(k, l)).unwrap();
        let scale = s.lw.abs() + (s.lambda * s.lb).abs() + 1.0;
        prop_assert!((s.operator_eigenvalue - 0.5 * s.e).abs() <= 1e-11 * scale);
    }

    #[test]
    fn morse_index_on_staircase(k in 1u32..20, x in 0.0f64..1.0) {
        let (a, b) = (1.0 / (k + 2) as f64, 1.0 / (k + 1) as f64);
        let r = a + x * (b - a);
        prop_assume!(r < b);
        let rep = morse_index(&make_torus(r).unwrap());
        prop_assert_eq!(rep.morse_index, k);
        prop_assert_eq!(rep.morse_index_weighted, 2 * k);
        let ls: Vec<u32> = rep.negative_modes.iter().map(|m| m.mode.l).collect();
        prop_assert_eq!(ls, (2..=k + 1).collect::<Vec<_>>());
    }

    #[test]
    fn stable_exactly_on_interval(r in radius()) {
        prop_assume!((r - 0.5).abs() > 1e-9 && (r - 3f64.sqrt() / 2.0).abs() > 1e-9);
        prop_assert_eq!(morse_index(&make_torus(r).unwrap()).stable, (0.5..=3f64.sqrt() / 2.0).contains(&r));
    }

    #[test]
    fn poisson_inverts_laplacian(r in 0.1f64..0.9, seed in any::<u64>()) {
        let t = make_torus(r).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let f = random_tensor(&t, &mut rng, 1.0).t12;
        let zero_mean = &f - &FourierField::constant(t, f.mean());
        let u = FourierField::solve_poisson(&zero_mean.laplacian()).unwrap();
        prop_assert!(u.max_abs_diff(&zero_mean) <= 1e-12);
        prop_assert!((&f * &u).reality_defect() <= 1e-13);
    }

    #[test]
    fn poisson_constants_match(r in 0.05f64..0.95, k in 0u32..12, l in 0u32..12) {
        prop_assume!((k, l) != (0, 0));
        let t = make_torus(r).unwrap();
        prop_assert!((c_from_poisson(&t, k, l).unwrap() - c_constant(&t, k, l).unwrap()).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn d_trace_matches_finite_differences(r in 0.2f64..0.9, seed in any::<u64>(), a in -0.5f64..0.5, bf in 0.6f64..1.6) {
        let t = make_torus(r).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let q = random_tensor(&t, &mut rng, 1.0);
        let h = random_tensor(&t, &mut rng, 0.3);
        let g = FlatMetric::teichmuller_chart(&t, a, bf * t.b()).unwrap();
        let analytic = d_trace(&g, &q, &h).unwrap();
        let pts = [(0.1, 0.2), (1.3, 0.4), (2.0, 2.5), (0.7, 3.1)];
        let scale = pts.iter().map(|&(u, v)| analytic.eval(u, v).abs()).fold(1e-300, f64::max);
        for (u, v) in pts {
            let fd = fd_trace_variation(&g, &q, &h, u, v);
            prop_assert!((fd - analytic.eval(u, v)).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn d_divergence_matches_finite_differences(r in 0.2f64..0.9, seed in any::<u64>()) {
        let t = make_torus(r).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let q = random_tensor(&t, &mut rng, 1.0);
        let h = random_tensor(&t, &mut rng, 0.3);
        let analytic = d_divergence(&FlatMetric::euclidean(), &q, &h).unwrap();
        let pts = [(0.1, 0.2), (1.3, 0.4), (2.0, 2.5), (0.7, 3.1)];
        let scale = pts
            .iter()
            .flat_map(|&(u, v)| analytic.eval(u, v))
            .map(f64::abs)
            .fold(1e-300, f64::max);
        for (u, v) in pts {
            let fd = fd_divergence_variation(&q, &h, u, v);
            let an = analytic.eval(u, v);
            prop_assert!((fd[0] - an[0]).abs() <= 1e-8 * scale);
            prop_assert!((fd[1] - an[1]).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn constant_profiles_reproduce_clifford_tori(r in 0.02f64..0.98) {
        let t = make_torus(r).unwrap();
        let p = clifford_profile(&t, 64).unwrap();
        prop_assert!(close(willmore_energy(&p).unwrap(), willmore_energy_clifford(&t), 1e-12));
        prop_assert!(close(conformal_class(&p).unwrap(), t.b(), 1e-12));
        let h = geometric_data(&t).h;
        for s in surface_data(&p).unwrap().samples {
            prop_assert!(close(s.h, h, 1e-12));
        }
    }

    #[test]
    fn wavy_profiles_are_rotation_invariant(
        rho in 0.4f64..1.1,
        a in -0.15f64..0.15,
        b in -0.15f64..0.15,
        m in 1usize..127,
    ) {
        let p = Profile::from_fn(128, |v| rho + a * (2.0 * v).sin() + b * (3.0 * v).cos()).unwrap();
        let q = p.rotated(m);
        prop_assert!((willmore_energy(&p).unwrap() - willmore_energy(&q).unwrap()).abs() <= 1e-11);
        prop_assert!((conformal_class(&p).unwrap() - conformal_class(&q).unwrap()).abs() <= 1e-12);
        for s in surface_data(&p).unwrap().samples {
            prop_assert!((s.position.norm() - 1.0).abs() <= 1e-14);
            prop_assert!((s.normal.norm() - 1.0).abs() <= 1e-12);
            prop_assert!(s.normal.dot(&s.hv).abs() <= 1e-12 && s.f.abs() <= 1e-14);
        }
    }

    #[test]
    fn field_products_commute(r in 0.1f64..0.9, seed in any::<u64>()) {
        let t = make_torus(r).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let x = random_tensor(&t, &mut rng, 1.0);
        let (f, g) = (x.t11, x.t22);
        prop_assert!((&f * &g).max_abs_diff(&(&g * &f)) <= 1e-15);
        let mut h = FourierField::zero(t);
        h.add_real_mode(1, 2, Complex64::new(0.3, -0.1));
        let lhs = &(&f + &g) * &h;
        let rhs = &(&f * &h) + &(&g * &h);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-15);
    }
}
