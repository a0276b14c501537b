//! Weierstrass data `g = c (wp + a)(wp + b) / wp'`, `eta = 2 wp dz` on the
//! square torus and the minimal immersion `X = Re ∫ (phi1, phi2, phi3)`.
//!
//! Every family in scope has a Gauss map of this shape, so the forms reduce
//! to rational functions of `wp` once `wp'^2 = 4 wp (wp^2 - e1^2)` is used:
//!
//! ```text
//! phi1 = wp - (c^2/4) N0^2 / (wp^2 - e1^2)
//! phi2 = i (wp + (c^2/4) N0^2 / (wp^2 - e1^2))
//! phi3 = (c/2) wp' N0 / (wp^2 - e1^2),          N0 = (wp + a)(wp + b)
//! ```
//!
//! These are regular at `(1+i)/2`, where `g` has a pole and `eta` a double
//! zero, so they are the forms used for integration.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{HalfPeriod, SquareLattice};
use crate::error::{Error, Result};
use crate::quadrature::{polyline_integral, QuadratureOptions};

const HALF: Complex64 = Complex64::new(0.5, 0.0);
const HALF_I: Complex64 = Complex64::new(0.0, 0.5);
/// `w2 = (1+i)/2`, the base point of every family.
pub const W2: Complex64 = Complex64::new(0.5, 0.5);

/// Offset used to step around a puncture on the default integration path.
const DETOUR: Complex64 = Complex64::new(0.013, 0.017);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    #[serde(rename = "chen-gackstatter")]
    ChenGackstatter,
    #[serde(rename = "weber2")]
    Weber2,
    #[serde(rename = "vilhena3")]
    Vilhena3,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 3] = [FamilyKind::ChenGackstatter, FamilyKind::Weber2, FamilyKind::Vilhena3];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::ChenGackstatter => "chen-gackstatter",
            FamilyKind::Weber2 => "weber2",
            FamilyKind::Vilhena3 => "vilhena3",
        }
    }

    /// Whether the family carries a free parameter `lambda`.
    pub fn has_lambda(self) -> bool {
        !matches!(self, FamilyKind::ChenGackstatter)
    }

    /// The period-problem solution `lambda = 3 e1`.
    pub fn solved_lambda(self, e1: f64) -> Option<f64> {
        self.has_lambda().then_some(3.0 * e1)
    }

    /// Scale constant from the hand-derived period conditions, valid on the
    /// solution set of the lambda quadratic.
    pub fn closed_form_c(self, e1: f64, lambda: f64) -> Result<f64> {
        let radicand = match self {
            FamilyKind::Vilhena3 => 6.0 * PI / (33.0 * e1 * lambda - 26.0 * e1 * e1),
            FamilyKind::Weber2 => {
                let bracket = (4.0 / 3.0 * e1 * e1 - 3.0 * e1 * PI) + (4.0 * PI - 2.0 * e1) * lambda
                    - PI / e1 * lambda * lambda;
                -4.0 * PI / bracket
            }
            FamilyKind::ChenGackstatter => 6.0 * PI / (e1 * e1),
        };
        if !(radicand > 0.0 && radicand.is_finite()) {
            return Err(Error::NonpositiveRadicand { value: radicand, lambda });
        }
        Ok(radicand.sqrt())
    }

    /// End orders, listed in puncture order.
    pub fn end_orders(self) -> Vec<u32> {
        match self {
            FamilyKind::ChenGackstatter => vec![3],
            FamilyKind::Weber2 => vec![1, 3],
            FamilyKind::Vilhena3 => vec![1, 3, 1],
        }
    }

    pub fn punctures(self) -> Vec<Complex64> {
        match self {
            FamilyKind::ChenGackstatter => vec![Complex64::new(0.0, 0.0)],
            FamilyKind::Weber2 => vec![HALF, Complex64::new(0.0, 0.0)],
            FamilyKind::Vilhena3 => vec![HALF, Complex64::new(0.0, 0.0), HALF_I],
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown family '{s}'")))
    }
}

/// Weierstrass datum `g = c (wp + a)(wp + b) / wp'`, `eta = 2 wp dz`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceFamily {
    pub kind: FamilyKind,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub lambda: Option<f64>,
    /// Puncture representatives in the fundamental domain.
    pub punctures: Vec<Complex64>,
    /// Where `X = 0`.
    pub base_point: Complex64,
}

impl SurfaceFamily {
    /// `g = c (wp - 3 e1)(wp + lambda) / wp'`, punctures `{1/2, 0, i/2}`.
    pub fn vilhena3(lambda: f64, c: f64, e1: f64) -> Self {
        Self {
            kind: FamilyKind::Vilhena3,
            a: -3.0 * e1,
            b: lambda,
            c,
            lambda: Some(lambda),
            punctures: FamilyKind::Vilhena3.punctures(),
            base_point: W2,
        }
    }

    /// `g = c (wp + e1)(wp - lambda) / wp'`, punctures `{1/2, 0}`.
    pub fn weber2(lambda: f64, c: f64, e1: f64) -> Self {
        Self {
            kind: FamilyKind::Weber2,
            a: e1,
            b: -lambda,
            c,
            lambda: Some(lambda),
            punctures: FamilyKind::Weber2.punctures(),
            base_point: W2,
        }
    }

    /// `g = (c/4) wp' / wp = c (wp + e1)(wp - e1) / wp'` with
    /// `c/4 = (1/(2 e1)) sqrt(3 pi / 2)`.
    pub fn chen_gackstatter(e1: f64) -> Self {
        let c = 2.0 / e1 * (1.5 * PI).sqrt();
        Self {
            kind: FamilyKind::ChenGackstatter,
            a: e1,
            b: -e1,
            c,
            lambda: None,
            punctures: FamilyKind::ChenGackstatter.punctures(),
            base_point: W2,
        }
    }

    /// Family with an explicit `(lambda, c)`; `lambda` is ignored for
    /// families without a free parameter.
    pub fn new(kind: FamilyKind, lambda: f64, c: f64, e1: f64) -> Self {
        match kind {
            FamilyKind::Vilhena3 => Self::vilhena3(lambda, c, e1),
            FamilyKind::Weber2 => Self::weber2(lambda, c, e1),
            FamilyKind::ChenGackstatter => Self {
                c,
                ..Self::chen_gackstatter(e1)
            },
        }
    }

    /// Family at the hand-derived solution `lambda = 3 e1` and its `c`.
    pub fn closed_form(kind: FamilyKind, e1: f64) -> Result<Self> {
        match kind.solved_lambda(e1) {
            Some(lambda) => Ok(Self::new(kind, lambda, kind.closed_form_c(e1, lambda)?, e1)),
            None => Ok(Self::chen_gackstatter(e1)),
        }
    }

    pub fn with_parameters(&self, lambda: f64, c: f64, e1: f64) -> Self {
        Self {
            punctures: self.punctures.clone(),
            base_point: self.base_point,
            ..Self::new(self.kind, lambda, c, e1)
        }
    }

    pub fn with_punctures(mut self, punctures: Vec<Complex64>) -> Self {
        self.punctures = punctures;
        self
    }

    /// Distance from `z` to the nearest lattice translate of a puncture.
    pub fn puncture_distance(&self, z: Complex64) -> f64 {
        self.punctures
            .iter()
            .map(|&p| SquareLattice::distance_to_lattice(z - p))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Coefficients of the `dz` parts of the three forms at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormSample {
    pub phi1: Complex64,
    pub phi2: Complex64,
    pub phi3: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Phi1,
    Phi2,
    Phi3,
}

impl Form {
    pub const ALL: [Form; 3] = [Form::Phi1, Form::Phi2, Form::Phi3];

    pub fn name(self) -> &'static str {
        match self {
            Form::Phi1 => "phi1",
            Form::Phi2 => "phi2",
            Form::Phi3 => "phi3",
        }
    }
}

impl FormSample {
    pub fn get(&self, form: Form) -> Complex64 {
        match form {
            Form::Phi1 => self.phi1,
            Form::Phi2 => self.phi2,
            Form::Phi3 => self.phi3,
        }
    }

    /// `|phi1^2 + phi2^2 + phi3^2| / (|phi1|^2 + |phi2|^2 + |phi3|^2)`.
    pub fn conformality_residual(&self) -> f64 {
        let sum = self.phi1 * self.phi1 + self.phi2 * self.phi2 + self.phi3 * self.phi3;
        let scale = self.phi1.norm_sqr() + self.phi2.norm_sqr() + self.phi3.norm_sqr();
        if scale == 0.0 {
            0.0
        } else {
            sum.norm() / scale
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImmersionPoint {
    pub x: [f64; 3],
    pub z: Complex64,
    /// `None` where `g` has a pole (normal pointing to the north pole).
    pub gauss: Option<Complex64>,
    pub conformal_factor: f64,
    pub curvature: f64,
}

/// Partial-fraction data of `N0 = (x + a)(x + b)` against `x^2 - e1^2`:
///
/// ```text
/// N0^2 / (x^2 - e1^2) = q0 + q1 x + x^2 + A/(x - e1) + B/(x + e1)
/// N0   / (x^2 - e1^2) = 1 + A3/(x - e1) + B3/(x + e1)
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialFractions {
    pub q0: f64,
    pub q1: f64,
    pub a: f64,
    pub b: f64,
    pub a3: f64,
    pub b3: f64,
}

impl PartialFractions {
    pub fn new(shift_a: f64, shift_b: f64, e1: f64) -> Self {
        let s = shift_a + shift_b;
        let p = shift_a * shift_b;
        let n0 = |x: f64| (x + shift_a) * (x + shift_b);
        Self {
            q0: s * s + 2.0 * p + e1 * e1,
            q1: 2.0 * s,
            a: n0(e1).powi(2) / (2.0 * e1),
            b: -n0(-e1).powi(2) / (2.0 * e1),
            a3: n0(e1) / (2.0 * e1),
            b3: -n0(-e1) / (2.0 * e1),
        }
    }
}

/// A family bound to an elliptic-function evaluator.
#[derive(Debug, Clone)]
pub struct Surface {
    family: SurfaceFamily,
    lattice: SquareLattice,
    fractions: PartialFractions,
    additive: [f64; 3],
}

impl Surface {
    pub fn new(family: SurfaceFamily, lattice: SquareLattice) -> Result<Self> {
        let e1 = lattice.e1();
        let fractions = PartialFractions::new(family.a, family.b, e1);
        let mut surface = Self {
            family,
            lattice,
            fractions,
            additive: [0.0; 3],
        };
        let base = surface.closed_primitive(surface.family.base_point)?;
        surface.additive = [-base[0], -base[1], -base[2]];
        Ok(surface)
    }

    /// Binds `family` to the shared default evaluator.
    pub fn standard(family: SurfaceFamily) -> Result<Self> {
        Self::new(family, SquareLattice::standard()?.clone())
    }

    pub fn family(&self) -> &SurfaceFamily {
        &self.family
    }

    pub fn lattice(&self) -> &SquareLattice {
        &self.lattice
    }

    pub fn fractions(&self) -> &PartialFractions {
        &self.fractions
    }

    fn e1(&self) -> f64 {
        self.lattice.e1()
    }

    /// `N0(wp) = (wp + a)(wp + b)`.
    fn n0(&self, wp: Complex64) -> Complex64 {
        (wp + self.family.a) * (wp + self.family.b)
    }

    fn check_puncture(&self, z: Complex64) -> Result<()> {
        let radius = self.lattice.config().pole_exclusion_radius;
        let distance = self.family.puncture_distance(z);
        if distance < radius {
            return Err(Error::PoleProximity { z, distance, radius });
        }
        Ok(())
    }

    /// `g(z) = c (wp + a)(wp + b) / wp'`.
    pub fn gauss_map(&self, z: Complex64) -> Result<Complex64> {
        let v = self.lattice.eval(z)?;
        let (g, _) = self.gauss_pair(v.wp, v.wp1, v.wp2);
        if !g.re.is_finite() || !g.im.is_finite() || g.norm() > 1e13 {
            return Err(Error::GaussMapPole(z));
        }
        Ok(g)
    }

    /// `g'(z)`.
    pub fn gauss_map_derivative(&self, z: Complex64) -> Result<Complex64> {
        let v = self.lattice.eval(z)?;
        let (g, dg) = self.gauss_pair(v.wp, v.wp1, v.wp2);
        if !dg.re.is_finite() || !dg.im.is_finite() || g.norm() > 1e13 {
            return Err(Error::GaussMapPole(z));
        }
        Ok(dg)
    }

    /// `g` and `g'`. Near the zero of `wp` by the quotient rule on
    /// `N/wp'`; elsewhere through `g = (c/4) wp' R(wp) / wp` with
    /// `R = N0/(wp² - e1²)` split into partial fractions, which stays finite
    /// at half periods where `N` and `wp'` vanish together.
    fn gauss_pair(&self, wp: Complex64, wp1: Complex64, wp2: Complex64) -> (Complex64, Complex64) {
        let e1 = self.e1();
        let c = self.family.c;
        if wp.norm() < 0.5 * e1 {
            let g = self.n0(wp) * c / wp1;
            return (g, self.wronskian(wp, wp1, wp2) / (wp1 * wp1));
        }
        let pf = &self.fractions;
        let one = Complex64::new(1.0, 0.0);
        let frac = |coef: f64, num: Complex64, den: Complex64| {
            if coef == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                num * coef / den
            }
        };
        let r = one + frac(pf.a3, one, wp - e1) + frac(pf.b3, one, wp + e1);
        // (wp² - e1²) R'(wp)
        let s = -frac(pf.a3, wp + e1, wp - e1) - frac(pf.b3, wp - e1, wp + e1);
        let q = wp * wp - e1 * e1;
        let g = wp1 * r / wp * (c / 4.0);
        let dg = (wp2 * r / wp + s * 4.0 - q * r / wp * 4.0) * (c / 4.0);
        (g, dg)
    }

    fn wronskian(&self, wp: Complex64, wp1: Complex64, wp2: Complex64) -> Complex64 {
        let c = self.family.c;
        let dn = (wp * 2.0 + self.family.a + self.family.b) * c;
        dn * wp1 * wp1 - self.n0(wp) * c * wp2
    }

    /// Forms from the rational expressions in `wp`, regular away from the
    /// punctures.
    pub fn phi_forms(&self, z: Complex64) -> Result<FormSample> {
        self.check_puncture(z)?;
        let v = self.lattice.eval(z)?;
        Ok(self.forms_from_values(v.wp, v.wp1))
    }

    fn forms_from_values(&self, wp: Complex64, wp1: Complex64) -> FormSample {
        let c = self.family.c;
        let e1 = self.e1();
        let denom = wp * wp - e1 * e1;
        let n0 = self.n0(wp);
        let k = n0 * n0 / denom * (c * c / 4.0);
        let i = Complex64::i();
        FormSample {
            phi1: wp - k,
            phi2: i * (wp + k),
            phi3: wp1 * n0 / denom * (c / 2.0),
        }
    }

    /// Forms from the defining product `(½(1-g²), (i/2)(1+g²), g) · 2 wp`.
    /// Undefined at poles of `g`.
    pub fn phi_forms_product(&self, z: Complex64) -> Result<FormSample> {
        self.check_puncture(z)?;
        let g = self.gauss_map(z)?;
        let eta = self.lattice.wp(z)? * 2.0;
        let g2 = g * g;
        Ok(FormSample {
            phi1: (1.0 - g2) * eta * 0.5,
            phi2: Complex64::i() * (1.0 + g2) * eta * 0.5,
            phi3: g * eta,
        })
    }

    /// Forms from the partial-fraction expansion, with `1/(wp ∓ e1)`
    /// replaced by the half-period translates of `wp` and `wp^2` by
    /// `wp''/6 + e1^2/3`.
    pub fn phi_forms_partial_fractions(&self, z: Complex64) -> Result<FormSample> {
        self.check_puncture(z)?;
        let e1 = self.e1();
        let c = self.family.c;
        let pf = &self.fractions;
        let v = self.lattice.eval(z)?;
        let inv_minus = (self.lattice.wp_shifted(z, HalfPeriod::Real)? - e1) / (2.0 * e1 * e1);
        let inv_plus = (self.lattice.wp_shifted(z, HalfPeriod::Imaginary)? + e1) / (2.0 * e1 * e1);
        let wp_sq = v.wp2 / 6.0 + e1 * e1 / 3.0;
        let quartic = wp_sq + v.wp * pf.q1 + pf.q0 + inv_minus * pf.a + inv_plus * pf.b;
        let quadratic = inv_minus * pf.a3 + inv_plus * pf.b3 + 1.0;
        let k = quartic * (c * c / 4.0);
        let i = Complex64::i();
        Ok(FormSample {
            phi1: v.wp - k,
            phi2: i * (v.wp + k),
            phi3: v.wp1 * quadratic * (c / 2.0),
        })
    }

    /// Real parts of the closed-form primitives, before normalization.
    ///
    /// ```text
    /// ∫ wp        = -zeta(z)
    /// ∫ wp^2      = wp'/6 + e1^2 z / 3
    /// ∫ 1/(wp-e1) = (-zeta(z - 1/2) - e1 z) / (2 e1^2)
    /// ∫ 1/(wp+e1) = (-zeta(z - i/2) + e1 z) / (2 e1^2)
    /// ∫ wp'/(wp∓e1) = ln(wp ∓ e1)
    /// ```
    fn closed_primitive(&self, z: Complex64) -> Result<[f64; 3]> {
        self.check_puncture(z)?;
        let e1 = self.e1();
        let c = self.family.c;
        let pf = &self.fractions;
        let v = self.lattice.eval(z)?;
        let zeta = self.lattice.zeta(z)?;
        let zero = Complex64::new(0.0, 0.0);
        // Terms with a zero coefficient are skipped: they are singular at
        // half periods that are regular points for the family.
        let int_minus = if pf.a == 0.0 {
            zero
        } else {
            (-self.lattice.zeta(z - HALF)? - z * e1) / (2.0 * e1 * e1) * pf.a
        };
        let int_plus = if pf.b == 0.0 {
            zero
        } else {
            (-self.lattice.zeta(z - HALF_I)? + z * e1) / (2.0 * e1 * e1) * pf.b
        };
        let int_sq = v.wp1 / 6.0 + z * (e1 * e1 / 3.0);
        let int_quartic = int_sq - zeta * pf.q1 + z * pf.q0 + int_minus + int_plus;
        let k = int_quartic * (c * c / 4.0);
        let i = Complex64::i();
        let f1 = -zeta - k;
        let f2 = i * (-zeta + k);
        let log_term = |coef: f64, w: Complex64| if coef == 0.0 { 0.0 } else { coef * w.norm().ln() };
        let f3 = (c / 2.0) * (v.wp.re + log_term(pf.a3, v.wp - e1) + log_term(pf.b3, v.wp + e1));
        Ok([f1.re, f2.re, f3])
    }

    /// Additive constants fixing `X(base_point) = 0`.
    pub fn additive_constants(&self) -> [f64; 3] {
        self.additive
    }

    /// Immersion from the closed-form primitives.
    pub fn immersion_closed(&self, z: Complex64) -> Result<ImmersionPoint> {
        let f = self.closed_primitive(z)?;
        let x = [f[0] + self.additive[0], f[1] + self.additive[1], f[2] + self.additive[2]];
        self.decorate(z, x)
    }

    fn decorate(&self, z: Complex64, x: [f64; 3]) -> Result<ImmersionPoint> {
        let (conformal_factor, curvature) = self.metric_curvature(z)?;
        let gauss = match self.gauss_map(z) {
            Ok(g) => Some(g),
            Err(Error::GaussMapPole(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(ImmersionPoint {
            x,
            z,
            gauss,
            conformal_factor,
            curvature,
        })
    }

    /// Two-segment path `base -> Re z + i Im base -> z`, stepping around any
    /// puncture a segment would pass too close to.
    pub fn default_path(&self, z: Complex64) -> Result<Vec<Complex64>> {
        let base = self.family.base_point;
        let corner = Complex64::new(z.re, base.im);
        let mut path = vec![base];
        for p in [corner, z] {
            if (p - *path.last().unwrap()).norm() > 0.0 {
                path.push(p);
            }
        }
        let radius = self.lattice.config().pole_exclusion_radius;
        for _ in 0..8 {
            match self.first_violation(&path, radius) {
                None => return Ok(path),
                Some((seg, closest)) => path.insert(seg + 1, closest + DETOUR),
            }
        }
        self.validate_path(&path)?;
        Ok(path)
    }

    /// Segment index and closest point of the first segment passing within
    /// `radius` of a puncture translate.
    fn first_violation(&self, path: &[Complex64], radius: f64) -> Option<(usize, Complex64)> {
        for (k, w) in path.windows(2).enumerate() {
            for p in self.puncture_translates_near(w[0], w[1]) {
                let closest = closest_point(w[0], w[1], p);
                if (closest - p).norm() < radius {
                    return Some((k, closest));
                }
            }
        }
        None
    }

    fn puncture_translates_near(&self, a: Complex64, b: Complex64) -> Vec<Complex64> {
        let lo_re = a.re.min(b.re).floor() as i64 - 1;
        let hi_re = a.re.max(b.re).ceil() as i64 + 1;
        let lo_im = a.im.min(b.im).floor() as i64 - 1;
        let hi_im = a.im.max(b.im).ceil() as i64 + 1;
        let mut out = Vec::new();
        for &p in &self.family.punctures {
            for m in lo_re..=hi_re {
                for n in lo_im..=hi_im {
                    out.push(p + Complex64::new(m as f64, n as f64));
                }
            }
        }
        out
    }

    pub fn validate_path(&self, path: &[Complex64]) -> Result<()> {
        let radius = self.lattice.config().pole_exclusion_radius;
        for w in path.windows(2) {
            for p in self.puncture_translates_near(w[0], w[1]) {
                if (closest_point(w[0], w[1], p) - p).norm() < radius {
                    return Err(Error::PathThroughPole {
                        from: w[0],
                        to: w[1],
                        puncture: p,
                        radius,
                    });
                }
            }
        }
        Ok(())
    }

    /// `Re ∫ phi` along `path` (which must start at the base point), with an
    /// absolute tolerance of 1e-9 per segment. `None` uses
    /// [`Self::default_path`].
    pub fn immersion_numeric(&self, z: Complex64, path: Option<&[Complex64]>) -> Result<ImmersionPoint> {
        let owned;
        let path = match path {
            Some(p) => {
                self.validate_path(p)?;
                p
            }
            None => {
                owned = self.default_path(z)?;
                &owned
            }
        };
        let x = self.integrate_forms(path, QuadratureOptions::with_tol(1e-9))?;
        self.decorate(z, x)
    }

    /// `Re ∫ (phi1, phi2, phi3)` along a polyline.
    pub fn integrate_forms(&self, path: &[Complex64], opts: QuadratureOptions) -> Result<[f64; 3]> {
        let mut out = [0.0; 3];
        for (slot, form) in out.iter_mut().zip(Form::ALL) {
            *slot = polyline_integral(|w| Ok(self.phi_forms(w)?.get(form)), path, opts)?.re;
        }
        Ok(out)
    }

    /// Conformal factor `½(1+|g|²)|2 wp|` and Gauss curvature
    /// `-(4|g'| / (|2 wp| (1+|g|²)²))²`.
    ///
    /// Written through `wp'^2 = 4 wp (wp^2 - e1^2)` so that both stay finite
    /// at poles of `g` that coincide with zeros of `wp`.
    pub fn metric_curvature(&self, z: Complex64) -> Result<(f64, f64)> {
        self.check_puncture(z)?;
        let v = self.lattice.eval(z)?;
        let (conformal, density) = self.metric_density(v.wp, v.wp1, v.wp2);
        Ok((conformal, density / (conformal * conformal)))
    }

    /// `K dA / du dv = -4 |g'|² / (1+|g|²)²`. Finite on the whole torus,
    /// punctures included, since `g` is meromorphic there.
    pub fn curvature_density(&self, z: Complex64) -> Result<f64> {
        let v = self.lattice.eval(z)?;
        Ok(self.metric_density(v.wp, v.wp1, v.wp2).1)
    }

    /// Conformal factor `|wp|(1+|g|²)` and curvature density. Near the zero
    /// of `wp`, where `g` may have a pole, both are written through
    /// `wp'^2 = 4 wp (wp^2 - e1^2)` so they stay finite.
    fn metric_density(&self, wp: Complex64, wp1: Complex64, wp2: Complex64) -> (f64, f64) {
        let e1 = self.e1();
        if wp.norm() < 0.5 * e1 {
            let num = self.n0(wp) * self.family.c;
            let w = self.wronskian(wp, wp1, wp2);
            let d2 = wp1.norm_sqr() + num.norm_sqr();
            let q = (wp * wp - e1 * e1).norm();
            return (d2 / (4.0 * q), -4.0 * w.norm_sqr() / (d2 * d2));
        }
        let (g, dg) = self.gauss_pair(wp, wp1, wp2);
        let lift = 1.0 + g.norm_sqr();
        (wp.norm() * lift, -4.0 * dg.norm_sqr() / (lift * lift))
    }

    /// `∫ (1+|g|²)|eta|` along the ray `puncture + t·dir`, `t` from `r_outer`
    /// down to `r_inner`.
    pub fn end_length(&self, puncture: Complex64, dir: Complex64, r_inner: f64, r_outer: f64) -> Result<f64> {
        let dir = dir / dir.norm();
        // Substituting t = exp(s) keeps the quadrature well conditioned for
        // integrands growing like t^-k.
        let value = crate::quadrature::integrate(
            |s| {
                let t = s.exp();
                let (conformal, _) = self.metric_curvature(puncture + dir * t)?;
                Ok(Complex64::new(2.0 * conformal * t, 0.0))
            },
            r_inner.ln(),
            r_outer.ln(),
            QuadratureOptions::with_tol(1e-6),
        )?;
        Ok(value.re)
    }
}

fn closest_point(a: Complex64, b: Complex64, p: Complex64) -> Complex64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return a;
    }
    let t = ((p - a) * d.conj()).re / len2;
    a + d * t.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn surface(kind: FamilyKind) -> Surface {
        let e1 = SquareLattice::standard().unwrap().e1();
        Surface::standard(SurfaceFamily::closed_form(kind, e1).unwrap()).unwrap()
    }

    #[test]
    fn family_names_round_trip() {
        for k in FamilyKind::ALL {
            assert_eq!(k.name().parse::<FamilyKind>().unwrap(), k);
        }
        assert!("nosuch".parse::<FamilyKind>().is_err());
    }

    #[test]
    fn partial_fractions_reconstruct() {
        let e1 = 6.875;
        let pf = PartialFractions::new(-3.0 * e1, 2.0 * e1, e1);
        for x in [0.3, -4.0, 17.0, 100.0] {
            let n0 = (x - 3.0 * e1) * (x + 2.0 * e1);
            let lhs = n0 * n0 / (x * x - e1 * e1);
            let rhs = pf.q0 + pf.q1 * x + x * x + pf.a / (x - e1) + pf.b / (x + e1);
            assert!((lhs - rhs).abs() < 1e-9 * lhs.abs().max(1.0));
            let lhs = n0 / (x * x - e1 * e1);
            let rhs = 1.0 + pf.a3 / (x - e1) + pf.b3 / (x + e1);
            assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn gauss_map_zero_and_pole() {
        let s = surface(FamilyKind::Vilhena3);
        let e1 = s.e1();
        // wp(z) = 3 e1 has a real solution on (0, 1/2); bisect for it.
        let (mut lo, mut hi) = (0.05, 0.5);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if s.lattice.wp(c(mid, 0.0)).unwrap().re > 3.0 * e1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(s.gauss_map(c(lo, 0.0)).unwrap().norm() < 1e-9);
        assert!(matches!(s.gauss_map(W2), Err(Error::GaussMapPole(_))));
    }

    #[test]
    fn forms_agree_across_routes() {
        for kind in FamilyKind::ALL {
            let s = surface(kind);
            for z in [c(0.3, 0.2), c(0.71, 0.13), c(0.22, 0.83)] {
                let a = s.phi_forms(z).unwrap();
                let b = s.phi_forms_product(z).unwrap();
                let d = s.phi_forms_partial_fractions(z).unwrap();
                for f in Form::ALL {
                    let scale = a.get(f).norm().max(1.0);
                    assert!((a.get(f) - b.get(f)).norm() < 1e-8 * scale, "{kind} {f:?} product");
                    assert!((a.get(f) - d.get(f)).norm() < 1e-8 * scale, "{kind} {f:?} fractions");
                }
                assert!(a.conformality_residual() < 1e-10);
            }
        }
    }

    #[test]
    fn metric_matches_textbook_formulas() {
        let s = surface(FamilyKind::Vilhena3);
        let z = c(0.37, 0.21);
        let g = s.gauss_map(z).unwrap();
        let gp = s.gauss_map_derivative(z).unwrap();
        let wp = s.lattice.wp(z).unwrap();
        let (conformal, k) = s.metric_curvature(z).unwrap();
        let lam = 0.5 * (1.0 + g.norm_sqr()) * (2.0 * wp).norm();
        let kk = -(4.0 * gp.norm() / ((2.0 * wp).norm() * (1.0 + g.norm_sqr()).powi(2))).powi(2);
        assert!((conformal - lam).abs() < 1e-10 * lam);
        assert!((k - kk).abs() < 1e-9 * kk.abs());
        // finite at the pole of g
        let (conformal, k) = s.metric_curvature(W2).unwrap();
        assert!(conformal.is_finite() && conformal > 0.0 && k.is_finite() && k < 0.0);
    }

    #[test]
    fn gauss_derivative_matches_difference() {
        let s = surface(FamilyKind::Weber2);
        let z = c(0.27, 0.36);
        let h = 1e-5;
        let fd = (s.gauss_map(z + h).unwrap() - s.gauss_map(z - h).unwrap()) / (2.0 * h);
        let exact = s.gauss_map_derivative(z).unwrap();
        assert!((fd - exact).norm() < 1e-6 * exact.norm());
    }

    #[test]
    fn base_point_normalized() {
        for kind in [FamilyKind::Weber2, FamilyKind::Vilhena3] {
            let s = surface(kind);
            let p = s.immersion_closed(W2).unwrap();
            for x in p.x {
                assert!(x.abs() < 1e-12);
            }
            assert!(p.gauss.is_none());
        }
    }

    #[test]
    fn default_path_avoids_punctures() {
        let s = surface(FamilyKind::Vilhena3);
        // The vertical leg toward this point runs straight through 1/2.
        let z = c(0.5, -0.2);
        let path = s.default_path(z).unwrap();
        assert_eq!(path.len(), 3);
        s.validate_path(&path).unwrap();
        let bad = [W2, c(0.5, 0.0), c(0.5, -0.2)];
        assert!(matches!(s.validate_path(&bad), Err(Error::PathThroughPole { .. })));
    }

    #[test]
    fn zero_length_path() {
        let s = surface(FamilyKind::Vilhena3);
        let p = s.immersion_numeric(W2, Some(&[W2])).unwrap();
        assert_eq!(p.x, [0.0; 3]);
    }

    #[test]
    fn puncture_queries_rejected() {
        let s = surface(FamilyKind::Vilhena3);
        assert!(s.phi_forms(c(0.5, 0.0005)).is_err());
        assert!(s.immersion_closed(c(1.0, 0.5)).is_err());
    }
}

#[cfg(test)]
mod immersion_tests {
    use super::*;

    #[test]
    fn closed_and_numeric_agree() {
        let e1 = SquareLattice::standard().unwrap().e1();
        for kind in FamilyKind::ALL {
            let s = Surface::standard(SurfaceFamily::closed_form(kind, e1).unwrap()).unwrap();
            for z in [
                Complex64::new(0.3, 0.2),
                Complex64::new(0.71, 0.13),
                Complex64::new(0.22, 0.83),
                Complex64::new(0.5, 0.1),
                Complex64::new(0.9, 0.9),
            ] {
                let a = s.immersion_closed(z).unwrap();
                let b = s.immersion_numeric(z, None).unwrap();
                for j in 0..3 {
                    assert!((a.x[j] - b.x[j]).abs() < 1e-8, "{kind} {z} {j}: {} vs {}", a.x[j], b.x[j]);
                }
            }
        }
    }
}
