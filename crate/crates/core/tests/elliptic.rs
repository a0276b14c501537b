use std::f64::consts::PI;

use proptest::prelude::*;
use wpmin_core::elliptic::{lattice_sum, EvaluationConfig, HalfPeriod, SquareLattice};
use wpmin_core::{Complex64, Error};

fn lattice() -> &'static SquareLattice {
    SquareLattice::standard().unwrap()
}

/// Points of the fundamental domain at least 0.05 from the lattice.
fn domain_point() -> impl Strategy<Value = Complex64> {
    (0.0..1.0f64, 0.0..1.0f64)
        .prop_map(|(x, y)| Complex64::new(x, y))
        .prop_filter("near a lattice point", |&z| SquareLattice::distance_to_lattice(z) > 0.05)
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn wp_is_doubly_periodic(z in domain_point(), m in -3i32..=3, n in -3i32..=3) {
        let l = lattice();
        let shifted = z + Complex64::new(m as f64, n as f64);
        prop_assert!(close(l.wp(shifted).unwrap(), l.wp(z).unwrap(), 1e-10));
        prop_assert!(close(l.wp_prime(shifted).unwrap(), l.wp_prime(z).unwrap(), 1e-10));
    }

    #[test]
    fn parity(z in domain_point()) {
        let l = lattice();
        prop_assert!(close(l.wp(-z).unwrap(), l.wp(z).unwrap(), 1e-11));
        prop_assert!(close(l.wp_prime(-z).unwrap(), -l.wp_prime(z).unwrap(), 1e-11));
        prop_assert!(close(l.zeta(-z).unwrap(), -l.zeta(z).unwrap(), 1e-11));
    }

    #[test]
    fn square_lattice_rotation(z in domain_point()) {
        // wp(iz) = -wp(z) on Z + iZ
        let l = lattice();
        prop_assert!(close(l.wp(Complex64::i() * z).unwrap(), -l.wp(z).unwrap(), 1e-11));
    }

    #[test]
    fn differential_equation(z in domain_point()) {
        let l = lattice();
        let v = l.eval(z).unwrap();
        let g2 = l.constants().g2;
        let rhs = v.wp.powi(3) * 4.0 - v.wp * g2;
        prop_assert!(close(v.wp1 * v.wp1, rhs, 1e-10));
        prop_assert!(close(v.wp2, v.wp * v.wp * 6.0 - g2 / 2.0, 1e-10));
    }

    #[test]
    fn zeta_quasi_periods(z in domain_point()) {
        let l = lattice();
        let zeta = l.zeta(z).unwrap();
        prop_assert!(close(l.zeta(z + 1.0).unwrap(), zeta + PI, 1e-10));
        prop_assert!(close(l.zeta(z + Complex64::i()).unwrap(), zeta - Complex64::new(0.0, PI), 1e-10));
    }

    #[test]
    fn zeta_derivative_is_minus_wp(z in domain_point()) {
        let l = lattice();
        let h = 1e-4;
        let d = (l.zeta(z + h).unwrap() * 8.0 - l.zeta(z - h).unwrap() * 8.0
            - l.zeta(z + 2.0 * h).unwrap() + l.zeta(z - 2.0 * h).unwrap()) / (12.0 * h);
        prop_assert!(close(d, -l.wp(z).unwrap(), 1e-8));
    }

    #[test]
    fn half_period_addition_matches_direct(z in domain_point()) {
        let l = lattice();
        for half in HalfPeriod::ALL {
            let w = z + half.value();
            if SquareLattice::distance_to_lattice(w) < 0.05 {
                continue;
            }
            let direct = l.wp_shifted(z, half).unwrap();
            let addition = l.wp_shifted_addition(z, half).unwrap();
            prop_assert!(close(addition, direct, 1e-9));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn agrees_with_lattice_sum(z in domain_point()) {
        let l = lattice();
        prop_assert!(close(l.wp(z).unwrap(), lattice_sum::wp(z, 120), 1e-8));
        prop_assert!(close(l.wp_prime(z).unwrap(), lattice_sum::wp_prime(z, 120), 1e-8));
        prop_assert!(close(l.zeta(z).unwrap(), lattice_sum::zeta(z, 120), 1e-8));
    }
}

#[test]
fn e1_matches_lattice_sum() {
    let e1 = lattice().e1();
    assert!((e1 - lattice_sum::e1(lattice_sum::DEFAULT_RADIUS)).abs() < 1e-9);
    assert!((e1 - 6.875185818020372).abs() < 1e-12);
}

#[test]
fn half_period_values() {
    let l = lattice();
    let e1 = l.e1();
    let c = Complex64::new;
    assert!((l.wp(c(0.5, 0.0)).unwrap() - e1).norm() < 1e-11);
    assert!((l.wp(c(0.0, 0.5)).unwrap() + e1).norm() < 1e-11);
    assert!(l.wp(c(0.5, 0.5)).unwrap().norm() < 1e-11);
    for h in HalfPeriod::ALL {
        assert!(l.wp_prime(h.value()).unwrap().norm() < 1e-10);
    }
}

#[test]
fn invariant_g2() {
    let k = lattice().constants();
    assert!((k.g2 / (k.e1 * k.e1) - 4.0).abs() < 1e-12);
}

#[test]
fn pole_guard() {
    let l = lattice();
    let err = l.wp(Complex64::new(1.0 + 1e-4, 1.0)).unwrap_err();
    assert!(matches!(err, Error::PoleProximity { .. }));
    assert!(matches!(l.zeta(Complex64::new(f64::INFINITY, 0.0)), Err(Error::NonFinite(_))));
}

#[test]
fn looser_targets_need_fewer_terms_but_stay_within_target() {
    let coarse = SquareLattice::new(EvaluationConfig {
        target_accuracy: 1e-6,
        ..Default::default()
    })
    .unwrap();
    let z = Complex64::new(0.3, 0.7);
    assert!((coarse.wp(z).unwrap() - lattice().wp(z).unwrap()).norm() < 1e-6);
}
