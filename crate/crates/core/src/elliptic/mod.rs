//! Weierstrass elliptic functions for the square lattice generated by `1` and `i`.
//!
//! Arguments are first reduced into the centred cell `|Re w|, |Im w| <= 1/2`
//! by a lattice translation. On that cell the functions are evaluated from
//! the logarithmic derivative of the Jacobi theta function `theta_1`,
//!
//! ```text
//! zeta(w) = 2 eta1 w + pi cot(pi w) + 4 pi sum_n a_n sin(2 n pi w),   a_n = q^{2n} / (1 - q^{2n}),
//! ```
//!
//! with nome `q = exp(-pi)`. The series converges like `exp(-pi n)` on the
//! cell, so twenty terms reach double precision. `wp`, `wp'` and `wp''` are
//! successive derivatives of the same series. The slowly convergent lattice
//! sums live in [`lattice_sum`] and serve only as an independent oracle.

pub mod lattice_sum;

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_SERIES_TERMS: usize = 64;

/// Accuracy target and pole guard shared by every evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationConfig {
    /// Absolute error bound for the truncated series tail.
    pub target_accuracy: f64,
    /// Minimum distance to any lattice point (pole of `wp` and `zeta`).
    pub pole_exclusion_radius: f64,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self {
            target_accuracy: 1e-11,
            pole_exclusion_radius: 1e-3,
        }
    }
}

impl EvaluationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1e-14..=1e-6).contains(&self.target_accuracy) {
            return Err(Error::InvalidConfig(format!(
                "target_accuracy {} outside [1e-14, 1e-6]",
                self.target_accuracy
            )));
        }
        if !(self.pole_exclusion_radius > 0.0 && self.pole_exclusion_radius.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "pole_exclusion_radius {} must be positive",
                self.pole_exclusion_radius
            )));
        }
        Ok(())
    }
}

/// Derived constants of the square lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeConstants {
    /// `wp(1/2)`.
    pub e1: f64,
    /// Invariant `g2`, from the Eisenstein series (independent of `e1`).
    pub g2: f64,
    /// `zeta(1/2)`.
    pub zeta_half: Complex64,
    /// `zeta(i/2)`.
    pub zeta_half_i: Complex64,
    /// `zeta((1+i)/2)`.
    pub zeta_w2: Complex64,
}

/// The three half periods of the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HalfPeriod {
    /// `1/2`
    Real,
    /// `i/2`
    Imaginary,
    /// `(1+i)/2`
    Diagonal,
}

impl HalfPeriod {
    pub const ALL: [HalfPeriod; 3] = [HalfPeriod::Real, HalfPeriod::Imaginary, HalfPeriod::Diagonal];

    pub fn value(self) -> Complex64 {
        match self {
            HalfPeriod::Real => Complex64::new(0.5, 0.0),
            HalfPeriod::Imaginary => Complex64::new(0.0, 0.5),
            HalfPeriod::Diagonal => Complex64::new(0.5, 0.5),
        }
    }
}

/// `wp` and its first two derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WpValues {
    pub wp: Complex64,
    pub wp1: Complex64,
    pub wp2: Complex64,
}

/// Evaluator for `wp`, `wp'`, `wp''` and `zeta` on the lattice `Z + iZ`.
#[derive(Debug, Clone)]
pub struct SquareLattice {
    config: EvaluationConfig,
    constants: LatticeConstants,
    /// `zeta(1/2)`, the real quasi-period half-increment.
    eta1: f64,
    /// `zeta(i/2)`.
    eta3: Complex64,
    /// `a_n = q^{2n} / (1 - q^{2n})` for `n = 1..`.
    coeffs: Vec<f64>,
}

static STANDARD: OnceLock<Result<SquareLattice>> = OnceLock::new();

/// Lattice constants under the default configuration, computed once.
pub fn lattice_constants() -> Result<LatticeConstants> {
    SquareLattice::standard().map(|l| *l.constants())
}

impl SquareLattice {
    pub fn new(config: EvaluationConfig) -> Result<Self> {
        config.validate()?;
        let q2 = (-2.0 * PI).exp();
        let mut coeffs = Vec::new();
        let mut converged = false;
        for n in 1..=MAX_SERIES_TERMS {
            let x = q2.powi(n as i32);
            let a = x / (1.0 - x);
            coeffs.push(a);
            // Largest term of the wp'' series on the reduced cell, where
            // |exp(2 pi i n w)| <= exp(pi n).
            let nf = n as f64;
            let bound = 32.0 * PI.powi(4) * nf.powi(3) * a * (PI * nf).exp();
            if bound < config.target_accuracy * 1e-4 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::ConvergenceFailure {
                what: "theta logarithmic derivative",
                target: config.target_accuracy,
                terms: MAX_SERIES_TERMS,
            });
        }

        // eta1 follows from the vanishing constant term of wp(z) - 1/z^2.
        let s1: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| (i + 1) as f64 * a)
            .sum();
        let eta1 = PI * PI / 6.0 - 4.0 * PI * PI * s1;

        // g2 from the Eisenstein series E4 (independent of e1).
        let s3: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| ((i + 1) as f64).powi(3) * a)
            .sum();
        let g2 = 4.0 * PI.powi(4) / 3.0 * (1.0 + 240.0 * s3);

        let mut lattice = SquareLattice {
            config,
            constants: LatticeConstants {
                e1: 0.0,
                g2,
                zeta_half: Complex64::new(eta1, 0.0),
                zeta_half_i: Complex64::new(0.0, 0.0),
                zeta_w2: Complex64::new(0.0, 0.0),
            },
            eta1,
            eta3: Complex64::new(0.0, 0.0),
            coeffs,
        };
        let (zeta_i, _) = lattice.series(HalfPeriod::Imaginary.value());
        lattice.eta3 = zeta_i;
        let e1 = lattice.series(HalfPeriod::Real.value()).1.wp.re;
        lattice.constants.e1 = e1;
        lattice.constants.zeta_half = lattice.zeta(HalfPeriod::Real.value())?;
        lattice.constants.zeta_half_i = zeta_i;
        lattice.constants.zeta_w2 = lattice.zeta(HalfPeriod::Diagonal.value())?;
        Ok(lattice)
    }

    /// Shared evaluator with [`EvaluationConfig::default`].
    pub fn standard() -> Result<&'static SquareLattice> {
        STANDARD
            .get_or_init(|| SquareLattice::new(EvaluationConfig::default()))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn config(&self) -> &EvaluationConfig {
        &self.config
    }

    pub fn constants(&self) -> &LatticeConstants {
        &self.constants
    }

    pub fn e1(&self) -> f64 {
        self.constants.e1
    }

    /// Distance from `z` to the nearest lattice point.
    pub fn distance_to_lattice(z: Complex64) -> f64 {
        let (w, _, _) = reduce(z);
        w.norm()
    }

    fn guard(&self, z: Complex64) -> Result<(Complex64, f64, f64)> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite(z));
        }
        let (w, m, n) = reduce(z);
        let distance = w.norm();
        if distance < self.config.pole_exclusion_radius {
            return Err(Error::PoleProximity {
                z,
                distance,
                radius: self.config.pole_exclusion_radius,
            });
        }
        Ok((w, m, n))
    }

    /// Series evaluation on the reduced cell; returns `(zeta, wp values)`.
    fn series(&self, w: Complex64) -> (Complex64, WpValues) {
        let i = Complex64::i();
        let piw = w * PI;
        let (s, c) = (piw.sin(), piw.cos());
        let cot = c / s;
        let csc2 = (s * s).inv();

        let u = (2.0 * PI * i * w).exp();
        let u_inv = u.inv();
        let (mut up, mut um) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        let mut sum_sin = Complex64::new(0.0, 0.0);
        let mut sum_cos1 = Complex64::new(0.0, 0.0);
        let mut sum_sin2 = Complex64::new(0.0, 0.0);
        let mut sum_cos3 = Complex64::new(0.0, 0.0);
        for (k, &a) in self.coeffs.iter().enumerate() {
            up *= u;
            um *= u_inv;
            let n = (k + 1) as f64;
            let sin_n = (up - um) / (2.0 * i);
            let cos_n = (up + um) * 0.5;
            sum_sin += sin_n * a;
            sum_cos1 += cos_n * (n * a);
            sum_sin2 += sin_n * (n * n * a);
            sum_cos3 += cos_n * (n * n * n * a);
        }
        let pi2 = PI * PI;
        let pi3 = pi2 * PI;
        let pi4 = pi2 * pi2;
        let zeta = w * (2.0 * self.eta1) + cot * PI + sum_sin * (4.0 * PI);
        let wp = csc2 * pi2 - 2.0 * self.eta1 - sum_cos1 * (8.0 * pi2);
        let wp1 = csc2 * cot * (-2.0 * pi3) + sum_sin2 * (16.0 * pi3);
        let wp2 = (csc2 * cot * cot * 4.0 + csc2 * csc2 * 2.0) * pi4 + sum_cos3 * (32.0 * pi4);
        (zeta, WpValues { wp, wp1, wp2 })
    }

    /// `wp`, `wp'` and `wp''` in one pass.
    pub fn eval(&self, z: Complex64) -> Result<WpValues> {
        let (w, _, _) = self.guard(z)?;
        Ok(self.series(w).1)
    }

    pub fn wp(&self, z: Complex64) -> Result<Complex64> {
        self.eval(z).map(|v| v.wp)
    }

    pub fn wp_prime(&self, z: Complex64) -> Result<Complex64> {
        self.eval(z).map(|v| v.wp1)
    }

    pub fn wp_second(&self, z: Complex64) -> Result<Complex64> {
        self.eval(z).map(|v| v.wp2)
    }

    /// Weierstrass zeta, including the quasi-period shift of the reduction.
    pub fn zeta(&self, z: Complex64) -> Result<Complex64> {
        let (w, m, n) = self.guard(z)?;
        let (zeta, _) = self.series(w);
        Ok(zeta + 2.0 * m * self.eta1 + 2.0 * n * self.eta3)
    }

    /// `wp(z + h)` for a half period `h`, by direct evaluation.
    pub fn wp_shifted(&self, z: Complex64, half: HalfPeriod) -> Result<Complex64> {
        self.wp(z + half.value())
    }

    /// `wp(z + h)` through the addition theorem. Singular where
    /// `wp(z) = wp(h)`; kept as a cross-check of [`Self::wp_shifted`].
    pub fn wp_shifted_addition(&self, z: Complex64, half: HalfPeriod) -> Result<Complex64> {
        let v = self.eval(z)?;
        let eh = self.wp(half.value())?;
        let denom = v.wp - eh;
        if denom.norm() < 1e-12 * (1.0 + eh.norm()) {
            return Err(Error::SingularAddition(z));
        }
        // wp'(h) = 0 at every half period.
        let ratio = v.wp1 / denom;
        Ok(ratio * ratio * 0.25 - v.wp - eh)
    }
}

/// Splits `z = w + m + n i` with `w` in the centred cell.
fn reduce(z: Complex64) -> (Complex64, f64, f64) {
    let m = z.re.round();
    let n = z.im.round();
    (Complex64::new(z.re - m, z.im - n), m, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn half_period_values() {
        let l = SquareLattice::standard().unwrap();
        let e1 = l.e1();
        assert!((l.wp(c(0.5, 0.0)).unwrap() - e1).norm() < 1e-14);
        assert!(l.wp(c(0.5, 0.5)).unwrap().norm() < 1e-11);
        assert!((l.wp(c(0.0, 0.5)).unwrap() + e1).norm() < 1e-11);
        assert!(l.wp_prime(c(0.5, 0.0)).unwrap().norm() < 1e-10);
    }

    #[test]
    fn parity() {
        let l = SquareLattice::standard().unwrap();
        let z = c(0.3, 0.2);
        assert!((l.wp(-z).unwrap() - l.wp(z).unwrap()).norm() < 1e-12);
        assert!((l.wp_prime(-z).unwrap() + l.wp_prime(z).unwrap()).norm() < 1e-11);
        let z = c(0.2, 0.3);
        assert!((l.zeta(-z).unwrap() + l.zeta(z).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn pole_guard() {
        let l = SquareLattice::standard().unwrap();
        for z in [c(0.0, 0.0), c(1.0, 1.0), c(2.0 + 1e-4, -3.0)] {
            assert!(matches!(l.wp(z), Err(Error::PoleProximity { .. })));
        }
        assert!(matches!(l.wp(c(f64::NAN, 0.0)), Err(Error::NonFinite(_))));
    }

    #[test]
    fn config_bounds() {
        let bad = EvaluationConfig {
            target_accuracy: 1e-3,
            ..Default::default()
        };
        assert!(SquareLattice::new(bad).is_err());
        let bad = EvaluationConfig {
            pole_exclusion_radius: 0.0,
            ..Default::default()
        };
        assert!(SquareLattice::new(bad).is_err());
    }

    #[test]
    fn second_derivative_at_half_periods() {
        let l = SquareLattice::standard().unwrap();
        let e1 = l.e1();
        let a = l.wp_second(c(0.5, 0.0)).unwrap();
        assert!((a - 4.0 * e1 * e1).norm() < 1e-9 * e1 * e1);
        let b = l.wp_second(c(0.5, 0.5)).unwrap();
        assert!((b + 2.0 * e1 * e1).norm() < 1e-9 * e1 * e1);
    }

    #[test]
    fn shifted_paths_agree() {
        let l = SquareLattice::standard().unwrap();
        let e1 = l.e1();
        let z = c(0.3, 0.3);
        let direct = l.wp_shifted(z, HalfPeriod::Real).unwrap();
        let lemma = 2.0 * e1 * e1 / (l.wp(z).unwrap() - e1) + e1;
        assert!((direct - lemma).norm() < 1e-9 * direct.norm());
        let z = c(0.2, 0.4);
        let direct = l.wp_shifted(z, HalfPeriod::Imaginary).unwrap();
        let lemma = 2.0 * e1 * e1 / (l.wp(z).unwrap() + e1) - e1;
        assert!((direct - lemma).norm() < 1e-9 * direct.norm());
        for h in HalfPeriod::ALL {
            let z = c(0.17, 0.29);
            let a = l.wp_shifted(z, h).unwrap();
            let b = l.wp_shifted_addition(z, h).unwrap();
            assert!((a - b).norm() < 1e-9 * (1.0 + a.norm()), "{h:?}");
        }
        assert!((l.wp_shifted(c(0.0, 0.0), HalfPeriod::Real).unwrap() - e1).norm() < 1e-13);
    }

    #[test]
    fn addition_path_reports_singularity() {
        let l = SquareLattice::standard().unwrap();
        // wp(z) = wp(1/2) at z = 1/2 itself.
        assert!(matches!(
            l.wp_shifted_addition(c(0.5, 0.0), HalfPeriod::Real),
            Err(Error::SingularAddition(_))
        ));
    }

    #[test]
    fn zeta_quasi_periods() {
        let l = SquareLattice::standard().unwrap();
        let z = c(0.31, -0.12);
        let k = l.constants();
        let d1 = l.zeta(z + 1.0).unwrap() - l.zeta(z).unwrap();
        let di = l.zeta(z + c(0.0, 1.0)).unwrap() - l.zeta(z).unwrap();
        assert!((d1 - 2.0 * k.zeta_half).norm() < 1e-12);
        assert!((di - 2.0 * k.zeta_half_i).norm() < 1e-12);
    }
}
