//! Numerical checks of the algebraic and integral identities satisfied by
//! `wp` and `zeta` on the square lattice.
//!
//! Each check evaluates both sides at sample points and records the largest
//! residual, relative to `max(1, |lhs|)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::elliptic::SquareLattice;
use crate::error::Result;
use crate::quadrature::{line_integral, QuadratureOptions};
use crate::weierstrass::FormSample;

const HALF: Complex64 = Complex64::new(0.5, 0.0);
const HALF_I: Complex64 = Complex64::new(0.0, 0.5);
const W2: Complex64 = Complex64::new(0.5, 0.5);

/// Step of the central differences used for antiderivative checks.
pub const FD_STEP: f64 = 1e-4;

/// Fourth-order central difference `F'(z)` with step `h`.
///
/// The two-point stencil carries an `h^2 f''/6` error, which reaches 1e-6
/// where the integrand is small but curved (around the zero of `wp` at
/// `(1+i)/2`), so it cannot separate a wrong primitive from its own error.
pub fn central_difference<F>(f: F, z: Complex64, h: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let d1 = f(z + h)? - f(z - h)?;
    let d2 = f(z + 2.0 * h)? - f(z - 2.0 * h)?;
    Ok((d1 * 8.0 - d2) / (12.0 * h))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub id: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Set when the identity as printed in the literature differs from the
    /// one checked here.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paper_discrepancy: Option<String>,
    /// Informational checks are reported but do not count towards a verdict.
    #[serde(default)]
    pub informational: bool,
}

impl IdentityCheck {
    pub fn new(id: &str, max_residual: f64, tolerance: f64) -> Self {
        Self {
            id: id.to_string(),
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
            paper_discrepancy: None,
            informational: false,
        }
    }
}

fn residual(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / lhs.norm().max(1.0)
}

/// `n` uniform points of the fundamental domain at distance at least
/// `min_distance` from every half period and lattice point.
pub fn sample_points(n: usize, seed: u64, min_distance: f64) -> Vec<Complex64> {
    sample_points_avoiding(n, seed, min_distance, &[Complex64::new(0.0, 0.0), HALF, HALF_I, W2])
}

/// `n` uniform points of the fundamental domain at distance at least
/// `min_distance` from every lattice translate of `avoid`.
pub fn sample_points_avoiding(n: usize, seed: u64, min_distance: f64, avoid: &[Complex64]) -> Vec<Complex64> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let z = Complex64::new(rng.gen::<f64>(), rng.gen::<f64>());
        let near = avoid
            .iter()
            .any(|&p| SquareLattice::distance_to_lattice(z - p) < min_distance);
        if !near {
            out.push(z);
        }
    }
    out
}

fn max_over<F>(points: &[Complex64], mut f: F) -> Result<f64>
where
    F: FnMut(Complex64) -> Result<f64>,
{
    points.iter().try_fold(0.0f64, |acc, &z| Ok(acc.max(f(z)?)))
}

/// Right-hand sides of the difference identities
/// `wp^k/(wp - e1) - wp^k/(wp + e1)` for `k = 0..=4`, in terms of the
/// half-period translates of `wp`.
pub fn difference_rhs(lattice: &SquareLattice, z: Complex64, k: usize) -> Result<Complex64> {
    let e1 = lattice.e1();
    let wp = lattice.wp(z)?;
    let p1 = lattice.wp(z - HALF)?;
    let p3 = lattice.wp(z - HALF_I)?;
    Ok(match k {
        0 => (p1 - p3 - 2.0 * e1) / (2.0 * e1 * e1),
        1 => (p1 + p3) / (2.0 * e1),
        2 => e1 + (p1 - p3) * 0.5,
        3 => wp * (2.0 * e1) + (p1 + p3) * (e1 / 2.0),
        4 => wp * wp * (2.0 * e1) + e1.powi(3) + (p1 - p3) * (e1 * e1 / 2.0),
        _ => panic!("difference identity defined for k <= 4"),
    })
}

fn difference_lhs(lattice: &SquareLattice, z: Complex64, k: i32) -> Result<Complex64> {
    let e1 = lattice.e1();
    let wp = lattice.wp(z)?;
    let pk = wp.powi(k);
    Ok(pk / (wp - e1) - pk / (wp + e1))
}

/// The forms of the three-end family written out through the difference
/// identities, term by term as in the hand computation of its periods.
pub fn expanded_three_end_forms(lattice: &SquareLattice, z: Complex64, lambda: f64, c: f64) -> Result<FormSample> {
    let e1 = lattice.e1();
    let v = lattice.eval(z)?;
    let w = |k| difference_rhs(lattice, z, k);
    let bracket = w(4)?
        + w(3)? * (2.0 * lambda - 6.0 * e1)
        + w(2)? * (lambda * lambda - 12.0 * e1 * lambda + 9.0 * e1 * e1)
        + w(1)? * (18.0 * e1 * e1 * lambda - 6.0 * e1 * lambda * lambda)
        + w(0)? * (9.0 * e1 * e1 * lambda * lambda);
    let k = bracket * (c * c / (8.0 * e1));
    let i = Complex64::i();
    let d = v.wp1 / (v.wp - e1);
    let s = v.wp1 / (v.wp + e1);
    let phi3 = (v.wp1 * (2.0 * e1) - d * (2.0 * e1 * e1 + 2.0 * e1 * lambda) + s * (4.0 * e1 * lambda - 4.0 * e1 * e1))
        * (c / (4.0 * e1));
    Ok(FormSample {
        phi1: v.wp - k,
        phi2: i * (v.wp + k),
        phi3,
    })
}

type Primitive = fn(&SquareLattice, Complex64) -> Result<Complex64>;

struct AntiderivativeCase {
    id: &'static str,
    integrand: Primitive,
    primitive: Primitive,
    discrepancy: Option<&'static str>,
    informational: bool,
}

fn ratio(l: &SquareLattice, z: Complex64, k: i32) -> Result<Complex64> {
    let wp = l.wp(z)?;
    Ok(wp.powi(k) / (wp - l.e1()))
}

fn antiderivative_cases() -> Vec<AntiderivativeCase> {
    vec![
        AntiderivativeCase {
            id: "antiderivative_ratio_k0",
            integrand: |l, z| ratio(l, z, 0),
            primitive: |l, z| {
                let e1 = l.e1();
                Ok(-l.zeta(z - HALF)? / (2.0 * e1 * e1) - z / (2.0 * e1))
            },
            discrepancy: None,
            informational: false,
        },
        AntiderivativeCase {
            id: "antiderivative_ratio_k1",
            integrand: |l, z| ratio(l, z, 1),
            primitive: |l, z| Ok(z / 2.0 - l.zeta(z - HALF)? / (2.0 * l.e1())),
            discrepancy: None,
            informational: false,
        },
        AntiderivativeCase {
            id: "antiderivative_ratio_k2",
            integrand: |l, z| ratio(l, z, 2),
            primitive: |l, z| Ok(z * (l.e1() / 2.0) - l.zeta(z)? - l.zeta(z - HALF)? * 0.5),
            discrepancy: None,
            informational: false,
        },
        AntiderivativeCase {
            id: "antiderivative_ratio_k3",
            integrand: |l, z| ratio(l, z, 3),
            primitive: |l, z| {
                let e1 = l.e1();
                Ok(z * (5.0 * e1 * e1 / 6.0) + l.wp_prime(z)? / 6.0 - l.zeta(z)? * e1 - l.zeta(z - HALF)? * (e1 / 2.0))
            },
            discrepancy: None,
            informational: false,
        },
        AntiderivativeCase {
            id: "antiderivative_difference_k0",
            integrand: |l, z| difference_lhs(l, z, 0),
            primitive: |l, z| {
                let e1 = l.e1();
                Ok((-l.zeta(z - HALF)? + l.zeta(z - HALF_I)? - z * (2.0 * e1)) / (2.0 * e1 * e1))
            },
            discrepancy: None,
            informational: false,
        },
        AntiderivativeCase {
            id: "antiderivative_difference_k1",
            integrand: |l, z| difference_lhs(l, z, 1),
            primitive: |l, z| {
                let e1 = l.e1();
                Ok(-(l.zeta(z - HALF)? + l.zeta(z - HALF_I)?) / (2.0 * e1))
            },
            discrepancy: None,
            informational: false,
        },
        AntiderivativeCase {
            id: "antiderivative_difference_k2",
            integrand: |l, z| difference_lhs(l, z, 2),
            primitive: |l, z| Ok(z * l.e1() - l.zeta(z - HALF)? * 0.5 + l.zeta(z - HALF_I)? * 0.5),
            discrepancy: None,
            informational: false,
        },
        AntiderivativeCase {
            id: "antiderivative_difference_k3",
            integrand: |l, z| difference_lhs(l, z, 3),
            primitive: |l, z| {
                let e1 = l.e1();
                Ok(-l.zeta(z)? * (2.0 * e1) - (l.zeta(z - HALF)? + l.zeta(z - HALF_I)?) * (e1 / 2.0))
            },
            discrepancy: Some(
                "printed with -(e1/2) wp(z - i/2) as the last term; only -(e1/2) zeta(z - i/2) differentiates to the integrand",
            ),
            informational: false,
        },
        AntiderivativeCase {
            id: "antiderivative_difference_k3_as_printed",
            integrand: |l, z| difference_lhs(l, z, 3),
            primitive: |l, z| {
                let e1 = l.e1();
                Ok(-l.zeta(z)? * (2.0 * e1) - l.zeta(z - HALF)? * (e1 / 2.0) - l.wp(z - HALF_I)? * (e1 / 2.0))
            },
            discrepancy: Some("literal printed form, expected to fail"),
            informational: true,
        },
        AntiderivativeCase {
            id: "antiderivative_difference_k4",
            integrand: |l, z| difference_lhs(l, z, 4),
            primitive: |l, z| {
                let e1 = l.e1();
                Ok(l.wp_prime(z)? * (e1 / 3.0) + z * (5.0 * e1.powi(3) / 3.0) - l.zeta(z - HALF)? * (e1 * e1 / 2.0)
                    + l.zeta(z - HALF_I)? * (e1 * e1 / 2.0))
            },
            discrepancy: None,
            informational: false,
        },
    ]
}

/// Algebraic identities: the differential equation, `wp^2` through `wp''`,
/// partial fractions through half-period translates, and the seven
/// difference identities.
pub fn algebraic_checks(lattice: &SquareLattice, points: &[Complex64]) -> Result<Vec<IdentityCheck>> {
    let e1 = lattice.e1();
    let mut out = Vec::new();

    let r = max_over(points, |z| {
        let v = lattice.eval(z)?;
        let rhs = v.wp * (v.wp - e1) * (v.wp + e1) * 4.0;
        Ok((v.wp1 * v.wp1 - rhs).norm() / (v.wp1 * v.wp1).norm().max(1.0))
    })?;
    out.push(IdentityCheck::new("wp_differential_equation", r, 1e-9));

    let r = max_over(points, |z| {
        let v = lattice.eval(z)?;
        Ok(residual(v.wp * v.wp, v.wp2 / 6.0 + e1 * e1 / 3.0))
    })?;
    out.push(IdentityCheck::new("wp_squared_via_second_derivative", r, 1e-9));

    let r = max_over(points, |z| {
        let wp = lattice.wp(z)?;
        Ok(residual((wp - e1).inv(), (lattice.wp(z - HALF)? - e1) / (2.0 * e1 * e1)))
    })?;
    out.push(IdentityCheck::new("inverse_wp_minus_e1", r, 1e-9));

    let r = max_over(points, |z| {
        let wp = lattice.wp(z)?;
        Ok(residual((wp + e1).inv(), (lattice.wp(z - HALF_I)? + e1) / (2.0 * e1 * e1)))
    })?;
    out.push(IdentityCheck::new("inverse_wp_plus_e1", r, 1e-9));

    let r = max_over(points, |z| {
        let wp = lattice.wp(z)?;
        let lhs = ((wp - e1) * (wp + e1)).inv();
        Ok(residual(lhs, ((wp - e1).inv() - (wp + e1).inv()) / (2.0 * e1)))
    })?;
    out.push(IdentityCheck::new("inverse_product_split", r, 1e-9));

    for k in 0..=4 {
        let r = max_over(points, |z| Ok(residual(difference_lhs(lattice, z, k as i32)?, difference_rhs(lattice, z, k)?)))?;
        out.push(IdentityCheck::new(&format!("difference_wp_power_k{k}"), r, 1e-8));
    }

    let r = max_over(points, |z| {
        let v = lattice.eval(z)?;
        let lhs = v.wp1 * v.wp / (v.wp - e1) - v.wp1 * v.wp / (v.wp + e1);
        let rhs = v.wp1 / (v.wp - e1) * e1 + v.wp1 / (v.wp + e1) * e1;
        Ok(residual(lhs, rhs))
    })?;
    out.push(IdentityCheck::new("difference_wp_prime_k1", r, 1e-8));

    let r = max_over(points, |z| {
        let v = lattice.eval(z)?;
        let w2 = v.wp * v.wp;
        let lhs = v.wp1 * w2 / (v.wp - e1) - v.wp1 * w2 / (v.wp + e1);
        let rhs = v.wp1 * (2.0 * e1) + v.wp1 / (v.wp - e1) * (e1 * e1) - v.wp1 / (v.wp + e1) * (e1 * e1);
        Ok(residual(lhs, rhs))
    })?;
    out.push(IdentityCheck::new("difference_wp_prime_k2", r, 1e-8));

    Ok(out)
}

/// Antiderivatives checked by [`central_difference`] with step [`FD_STEP`].
pub fn antiderivative_checks(lattice: &SquareLattice, points: &[Complex64]) -> Result<Vec<IdentityCheck>> {
    let h = FD_STEP;
    antiderivative_cases()
        .into_iter()
        .map(|case| {
            let r = max_over(points, |z| {
                let fd = central_difference(|w| (case.primitive)(lattice, w), z, h)?;
                Ok(residual((case.integrand)(lattice, z)?, fd))
            })?;
            let mut check = IdentityCheck::new(case.id, r, 1e-6);
            check.paper_discrepancy = case.discrepancy.map(str::to_string);
            check.informational = case.informational;
            Ok(check)
        })
        .collect()
}

/// The five reflection/rotation relations of `wp` about `w2 = (1+i)/2`.
pub fn symmetry_checks(lattice: &SquareLattice, points: &[Complex64]) -> Result<Vec<IdentityCheck>> {
    let i = Complex64::i();
    let rho = |z: Complex64| W2 + i * (z - W2);
    let beta = |z: Complex64| W2 + (z - W2).conj();
    let mu = |z: Complex64| W2 - i * (z - W2).conj();
    type Case<'a> = (&'a str, Box<dyn Fn(Complex64) -> Complex64 + 'a>, fn(Complex64) -> Complex64);
    let cases: Vec<Case> = vec![
        ("wp_rotation_quarter_turn", Box::new(rho), |w| -w),
        ("wp_reflection_horizontal", Box::new(beta), |w| w.conj()),
        ("wp_reflection_positive_diagonal", Box::new(move |z| rho(beta(z))), |w| -w.conj()),
        ("wp_reflection_vertical", Box::new(move |z| rho(rho(beta(z)))), |w| w.conj()),
        ("wp_reflection_negative_diagonal", Box::new(mu), |w| -w.conj()),
    ];
    cases
        .into_iter()
        .map(|(id, map, expect)| {
            let r = max_over(points, |z| Ok((lattice.wp(map(z))? - expect(lattice.wp(z)?)).norm()))?;
            Ok(IdentityCheck::new(id, r, 1e-9))
        })
        .collect()
}

/// `zeta` at the three half periods against `pi/2`, `-i pi/2`,
/// `pi/2 - i pi/2`.
pub fn legendre_checks(lattice: &SquareLattice) -> Result<Vec<IdentityCheck>> {
    let h = PI / 2.0;
    [
        ("zeta_half", HALF, Complex64::new(h, 0.0)),
        ("zeta_half_i", HALF_I, Complex64::new(0.0, -h)),
        ("zeta_w2", W2, Complex64::new(h, -h)),
    ]
    .into_iter()
    .map(|(id, z, expect)| Ok(IdentityCheck::new(id, (lattice.zeta(z)? - expect).norm(), 1e-10)))
    .collect()
}

/// `∮ wp(z - s) dz` over `alpha(t) = i/3 + t` and `beta(t) = 1/3 + i t` for
/// the four shifts `s`, against `-pi` and `i pi`.
pub fn cycle_checks(lattice: &SquareLattice) -> Result<Vec<IdentityCheck>> {
    let shifts = [
        ("", Complex64::new(0.0, 0.0)),
        ("_shift_half", HALF),
        ("_shift_half_i", HALF_I),
        ("_shift_w2", W2),
    ];
    let opts = QuadratureOptions::with_tol(1e-10);
    let mut out = Vec::new();
    for (suffix, s) in shifts {
        let third = 1.0 / 3.0;
        let a = line_integral(
            |z| lattice.wp(z - s),
            Complex64::new(0.0, third),
            Complex64::new(1.0, third),
            opts,
        )?;
        out.push(IdentityCheck::new(&format!("alpha_integral_wp{suffix}"), (a + PI).norm(), 1e-9));
        let b = line_integral(
            |z| lattice.wp(z - s),
            Complex64::new(third, 0.0),
            Complex64::new(third, 1.0),
            opts,
        )?;
        out.push(IdentityCheck::new(
            &format!("beta_integral_wp{suffix}"),
            (b - Complex64::new(0.0, PI)).norm(),
            1e-9,
        ));
    }
    Ok(out)
}

/// Every check above on `n` seeded sample points.
pub fn all_checks(lattice: &SquareLattice, n: usize, seed: u64) -> Result<Vec<IdentityCheck>> {
    let algebraic_points = sample_points(n, seed, 0.05);
    let fd_points = sample_points(n, seed.wrapping_add(1), 0.05);
    let mut out = legendre_checks(lattice)?;
    out.extend(cycle_checks(lattice)?);
    out.extend(algebraic_checks(lattice, &algebraic_points)?);
    out.extend(antiderivative_checks(lattice, &fd_points)?);
    out.extend(symmetry_checks(lattice, &algebraic_points)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_identity_holds() {
        let lattice = SquareLattice::standard().unwrap();
        for check in all_checks(lattice, 50, 7).unwrap() {
            if check.informational {
                assert!(!check.pass, "{} unexpectedly holds", check.id);
            } else {
                assert!(check.pass, "{}: {:e} > {:e}", check.id, check.max_residual, check.tolerance);
            }
        }
    }

    #[test]
    fn samples_respect_distance() {
        for z in sample_points(200, 3, 0.2) {
            assert!(z.re >= 0.0 && z.re < 1.0 && z.im >= 0.0 && z.im < 1.0);
            for p in [Complex64::new(0.0, 0.0), HALF, HALF_I, W2] {
                assert!(SquareLattice::distance_to_lattice(z - p) >= 0.2);
            }
        }
    }
}
