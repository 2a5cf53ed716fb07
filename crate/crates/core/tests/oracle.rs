use std::f64::consts::{FRAC_1_SQRT_2, PI};

use cmc_torus::error::Error;
use cmc_torus::make_torus;
use cmc_torus::oracle::{second_variation_fd, verify_mode, Direction, VariationSpec};
use cmc_torus::spectrum::e_value;

fn measure(r: f64, direction: Direction) -> f64 {
    let rep = second_variation_fd(&VariationSpec::new(make_torus(r).unwrap(), direction)).unwrap();
    assert!(rep.constraint_residual <= 1e-12);
    assert!(rep.converged, "{rep:?}");
    rep.measured
}

#[test]
fn unstable_directions_at_r_03() {
    for l in [2, 3] {
        assert!(measure(0.3, Direction::Sin(l)) < 0.0);
        assert!(measure(0.3, Direction::Cos(l)) < 0.0);
    }
    assert!(measure(0.3, Direction::Sin(4)) > 0.0);
}

#[test]
fn stable_range_is_positive() {
    assert!(measure(0.6, Direction::Sin(2)) > 0.0);
    assert!(measure(0.6, Direction::Cos(3)) > 0.0);
}

#[test]
fn measured_is_half_of_factored_prediction() {
    for (r, l) in [(FRAC_1_SQRT_2, 2), (0.4, 2), (0.45, 5), (0.8, 3)] {
        let t = make_torus(r).unwrap();
        let predicted = 2.0 * PI * PI * t.r() * t.s() * e_value(&t, 0, l).unwrap();
        let ratio = measure(r, Direction::Sin(l)) / predicted;
        assert!((ratio - 0.5).abs() < 1e-5, "r={r} l={l}: ratio {ratio}");
    }
}

#[test]
fn zero_mode_verifies() {
    let spec = VariationSpec::new(make_torus(0.55).unwrap(), Direction::Sin(1));
    let rep = verify_mode(&spec, 1).unwrap();
    assert!(rep.passed && rep.isotropy <= 1e-6);
}

#[test]
fn nonzero_modes_fail_with_diagnostics() {
    let spec = VariationSpec::new(make_torus(0.3).unwrap(), Direction::Sin(2));
    match verify_mode(&spec, 3) {
        Err(Error::VerificationFailed(rep)) => {
            assert!(rep.expected_negative);
            assert!(rep.failures.iter().all(|f| f.contains("relative error")), "{:?}", rep.failures);
            assert!(rep.sin.operator_rel_error < 5e-3 && rep.cos.operator_rel_error < 5e-3);
        }
        other => panic!("unexpected {other:?}"),
    }
}
