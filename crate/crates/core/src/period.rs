//! Cycle integrals over the homology basis, residues at the ends, and the
//! numerical solution of the period problem.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::SquareLattice;
use crate::error::{Error, Result};
use crate::quadrature::{circle_integral, line_integral, QuadratureOptions};
use crate::weierstrass::{FamilyKind, Form, Surface, SurfaceFamily};

/// Absolute tolerance for cycle integrals.
pub const CYCLE_TOL: f64 = 1e-10;
/// Radius of the residue contours.
pub const RESIDUE_RADIUS: f64 = 0.05;
/// Trapezoid nodes on a residue contour.
pub const RESIDUE_NODES: usize = 512;
/// Sample values of `lambda / e1` for the quadratic fit, plus a fourth
/// value used only to confirm the fit.
const FIT_SAMPLES: [f64; 3] = [0.0, 2.0, 4.0];
const FIT_CHECK: f64 = 5.0;
const FIT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HomologyCycle {
    /// `alpha(t) = i/3 + t`
    Alpha,
    /// `beta(t) = 1/3 + i t`
    Beta,
}

impl HomologyCycle {
    pub const ALL: [HomologyCycle; 2] = [HomologyCycle::Alpha, HomologyCycle::Beta];

    pub fn name(self) -> &'static str {
        match self {
            HomologyCycle::Alpha => "alpha",
            HomologyCycle::Beta => "beta",
        }
    }

    pub fn point(self, t: f64) -> Complex64 {
        match self {
            HomologyCycle::Alpha => Complex64::new(t, 1.0 / 3.0),
            HomologyCycle::Beta => Complex64::new(1.0 / 3.0, t),
        }
    }

    pub fn endpoints(self) -> (Complex64, Complex64) {
        (self.point(0.0), self.point(1.0))
    }
}

/// What to integrate around a cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleIntegrand {
    Form(Form),
    Wp,
    WpShiftHalf,
    WpShiftHalfI,
    WpShiftDiagonal,
}

impl CycleIntegrand {
    fn wp_shift(self) -> Option<Complex64> {
        match self {
            CycleIntegrand::Form(_) => None,
            CycleIntegrand::Wp => Some(Complex64::new(0.0, 0.0)),
            CycleIntegrand::WpShiftHalf => Some(Complex64::new(0.5, 0.0)),
            CycleIntegrand::WpShiftHalfI => Some(Complex64::new(0.0, 0.5)),
            CycleIntegrand::WpShiftDiagonal => Some(Complex64::new(0.5, 0.5)),
        }
    }
}

/// `∮ wp(z - s) dz` over a cycle.
pub fn wp_cycle_integral(lattice: &SquareLattice, integrand: CycleIntegrand, cycle: HomologyCycle) -> Result<Complex64> {
    let s = integrand
        .wp_shift()
        .ok_or_else(|| Error::InvalidConfig("form integrands need a surface".into()))?;
    let (a, b) = cycle.endpoints();
    line_integral(|z| lattice.wp(z - s), a, b, QuadratureOptions::with_tol(CYCLE_TOL))
}

/// `∮ integrand dz` over a cycle, using the `(lambda, c)` installed in the
/// surface.
pub fn cycle_integral(surface: &Surface, integrand: CycleIntegrand, cycle: HomologyCycle) -> Result<Complex64> {
    match integrand {
        CycleIntegrand::Form(form) => {
            let (a, b) = cycle.endpoints();
            line_integral(
                |z| Ok(surface.phi_forms(z)?.get(form)),
                a,
                b,
                QuadratureOptions::with_tol(CYCLE_TOL),
            )
        }
        _ => wp_cycle_integral(surface.lattice(), integrand, cycle),
    }
}

/// `max |Re ∮ phi_j|` over the three forms and both cycles.
pub fn period_residual(surface: &Surface) -> Result<f64> {
    let mut worst = 0.0f64;
    for cycle in HomologyCycle::ALL {
        for form in Form::ALL {
            worst = worst.max(cycle_integral(surface, CycleIntegrand::Form(form), cycle)?.re.abs());
        }
    }
    Ok(worst)
}

/// `K(lambda) = ∮ N0^2 / (4 (wp^2 - e1^2)) dz`, the `c^2` coefficient in
/// `∮ phi1 = ∮ wp - c^2 K`.
fn scale_integral(kind: FamilyKind, lattice: &SquareLattice, lambda: f64, cycle: HomologyCycle) -> Result<Complex64> {
    let e1 = lattice.e1();
    let family = SurfaceFamily::new(kind, lambda, 1.0, e1);
    let (a, b) = (family.a, family.b);
    let (z0, z1) = cycle.endpoints();
    line_integral(
        |z| {
            let wp = lattice.wp(z)?;
            let n0 = (wp + a) * (wp + b);
            Ok(n0 * n0 / ((wp * wp - e1 * e1) * 4.0))
        },
        z0,
        z1,
        QuadratureOptions::with_tol(CYCLE_TOL),
    )
}

/// Coefficients `[c0, c1, c2]` of the parabola through three points.
fn fit_quadratic(xs: [f64; 3], ys: [f64; 3]) -> [f64; 3] {
    let [x0, x1, x2] = xs;
    let [y0, y1, y2] = ys;
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let c2 = (d12 - d01) / (x2 - x0);
    let c1 = d01 - c2 * (x0 + x1);
    let c0 = y0 - c1 * x0 - c2 * x0 * x0;
    [c0, c1, c2]
}

fn eval_quadratic(c: [f64; 3], x: f64) -> f64 {
    c[0] + c[1] * x + c[2] * x * x
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaRoot {
    pub value: f64,
    /// `lambda = e1` collapses the three-end datum onto the two-end one and
    /// is excluded from the family.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaSolution {
    pub family: FamilyKind,
    pub e1: f64,
    /// Ascending.
    pub roots: Vec<LambdaRoot>,
    /// `Re K_alpha(lambda)` as `[c0, c1, c2]`.
    pub alpha_coefficients: [f64; 3],
    /// `Im K_beta(lambda)`.
    pub beta_coefficients: [f64; 3],
    /// `Re K_alpha - Im K_beta`, scaled to a unit leading coefficient.
    pub balance_monic: [f64; 3],
    /// Largest relative mismatch of the fits at the confirmation sample.
    pub fit_residual: f64,
}

impl LambdaSolution {
    pub fn admissible(&self) -> Option<f64> {
        self.roots.iter().filter(|r| !r.degenerate).map(|r| r.value).next_back()
    }

    /// `-pi / Re K_alpha(lambda)`, the `c^2` that kills `Re ∮_alpha phi1`.
    pub fn c_squared(&self, lambda: f64) -> f64 {
        -PI / eval_quadratic(self.alpha_coefficients, lambda)
    }
}

/// Reduces `Re ∮_alpha phi1 = 0` and `Re ∮_beta phi2 = 0` to a quadratic in
/// `lambda` from cycle integrals at three sample values and returns its
/// roots.
///
/// With `∮_alpha phi1 = -pi - c^2 K_alpha` and `∮_beta phi2 = -pi - c^2 i K_beta`
/// (up to purely imaginary parts), both conditions hold iff
/// `Re K_alpha = Im K_beta` and `c^2 = -pi / Re K_alpha`.
pub fn solve_lambda(kind: FamilyKind, lattice: &SquareLattice) -> Result<LambdaSolution> {
    if !kind.has_lambda() {
        return Err(Error::Unsupported(format!("{kind} has no free parameter")));
    }
    let e1 = lattice.e1();
    let xs = FIT_SAMPLES.map(|s| s * e1);
    let mut alpha = [0.0; 3];
    let mut beta = [0.0; 3];
    for (k, &x) in xs.iter().enumerate() {
        alpha[k] = scale_integral(kind, lattice, x, HomologyCycle::Alpha)?.re;
        beta[k] = scale_integral(kind, lattice, x, HomologyCycle::Beta)?.im;
    }
    let alpha_coefficients = fit_quadratic(xs, alpha);
    let beta_coefficients = fit_quadratic(xs, beta);

    let x = FIT_CHECK * e1;
    let check_alpha = scale_integral(kind, lattice, x, HomologyCycle::Alpha)?.re;
    let check_beta = scale_integral(kind, lattice, x, HomologyCycle::Beta)?.im;
    let rel = |fit: f64, actual: f64| (fit - actual).abs() / actual.abs().max(1.0);
    let fit_residual = rel(eval_quadratic(alpha_coefficients, x), check_alpha)
        .max(rel(eval_quadratic(beta_coefficients, x), check_beta));
    if fit_residual > FIT_TOL {
        return Err(Error::FitDegeneracy { residual: fit_residual });
    }

    let balance: [f64; 3] = std::array::from_fn(|k| alpha_coefficients[k] - beta_coefficients[k]);
    let lead = balance[2];
    if lead.abs() < 1e-12 * balance.iter().fold(0.0f64, |m, v| m.max(v.abs())) {
        return Err(Error::FitDegeneracy { residual: lead });
    }
    let balance_monic = [balance[0] / lead, balance[1] / lead, 1.0];
    let mut roots = quadratic_roots(balance_monic[1], balance_monic[0])
        .into_iter()
        .map(|value| LambdaRoot {
            value,
            degenerate: (value - e1).abs() < 1e-6 * e1,
        })
        .collect::<Vec<_>>();
    roots.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(LambdaSolution {
        family: kind,
        e1,
        roots,
        alpha_coefficients,
        beta_coefficients,
        balance_monic,
        fit_residual,
    })
}

/// Real roots of `x^2 + b x + c`.
fn quadratic_roots(b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0, 0.0];
    }
    vec![q, c / q]
}

/// Positive `c` with `Re ∮_alpha phi1 = 0` at the given `lambda`.
pub fn solve_c(kind: FamilyKind, lambda: f64, lattice: &SquareLattice) -> Result<f64> {
    let k = scale_integral(kind, lattice, lambda, HomologyCycle::Alpha)?.re;
    let radicand = -PI / k;
    if !(radicand > 0.0 && radicand.is_finite()) {
        return Err(Error::NonpositiveRadicand { value: radicand, lambda });
    }
    Ok(radicand.sqrt())
}

/// Family with `(lambda, c)` from the numerical period solution.
pub fn solved_family(kind: FamilyKind, lattice: &SquareLattice) -> Result<SurfaceFamily> {
    let e1 = lattice.e1();
    let lambda = match kind.has_lambda() {
        true => solve_lambda(kind, lattice)?
            .admissible()
            .ok_or(Error::FitDegeneracy { residual: f64::NAN })?,
        false => e1,
    };
    let c = solve_c(kind, lambda, lattice)?;
    Ok(SurfaceFamily::new(kind, lambda, c, e1))
}

/// `(1/2 pi i) ∮ phi dz` on a circle of radius [`RESIDUE_RADIUS`] around a
/// puncture.
pub fn residue_at(surface: &Surface, form: Form, puncture: Complex64) -> Result<Complex64> {
    let family = surface.family();
    let same = |p: Complex64| SquareLattice::distance_to_lattice(p - puncture) < 1e-12;
    if !family.punctures.iter().any(|&p| same(p)) {
        return Err(Error::InvalidConfig(format!("{puncture} is not a puncture of {}", family.kind)));
    }
    for &p in &family.punctures {
        for m in -1..=1 {
            for n in -1..=1 {
                let q = p + Complex64::new(m as f64, n as f64);
                let d = (q - puncture).norm();
                if d > 1e-12 && d <= RESIDUE_RADIUS {
                    return Err(Error::ContourCrossesSingularity {
                        center: puncture,
                        radius: RESIDUE_RADIUS,
                    });
                }
            }
        }
    }
    let integral = circle_integral(|z| Ok(surface.phi_forms(z)?.get(form)), puncture, RESIDUE_RADIUS, RESIDUE_NODES)?;
    Ok(integral / Complex64::new(0.0, 2.0 * PI))
}

/// `2 pi (2 - 2 genus - N - Σ k)` for `N` ends of orders `k`.
pub fn jorge_meeks_total_curvature(genus: u32, end_orders: &[u32]) -> f64 {
    let n = end_orders.len() as f64;
    let sum: f64 = end_orders.iter().map(|&k| k as f64).sum();
    2.0 * PI * (2.0 - 2.0 * genus as f64 - n - sum)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleIntegralEntry {
    pub form: Form,
    pub cycle: HomologyCycle,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueEntry {
    /// `[re, im]` of the puncture.
    pub puncture: [f64; 2],
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodReport {
    pub family: FamilyKind,
    pub lambda: Option<f64>,
    pub c: f64,
    pub cycle_integrals: Vec<CycleIntegralEntry>,
    /// Residues of `phi3`.
    pub residues: Vec<ResidueEntry>,
    /// Largest `|Res phi1|`, `|Res phi2|` over all punctures.
    pub phi12_residue_max: f64,
    /// `|Σ Res phi3|`.
    pub residue_sum: f64,
    pub residual_norm: f64,
}

pub fn period_report(surface: &Surface) -> Result<PeriodReport> {
    let family = surface.family();
    let mut cycle_integrals = Vec::new();
    let mut residual_norm = 0.0f64;
    for form in Form::ALL {
        for cycle in HomologyCycle::ALL {
            let v = cycle_integral(surface, CycleIntegrand::Form(form), cycle)?;
            residual_norm = residual_norm.max(v.re.abs());
            cycle_integrals.push(CycleIntegralEntry {
                form,
                cycle,
                re: v.re,
                im: v.im,
            });
        }
    }
    let mut residues = Vec::new();
    let mut phi12_residue_max = 0.0f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for &p in &family.punctures {
        let r3 = residue_at(surface, Form::Phi3, p)?;
        sum += r3;
        residues.push(ResidueEntry {
            puncture: [p.re, p.im],
            re: r3.re,
            im: r3.im,
        });
        for form in [Form::Phi1, Form::Phi2] {
            phi12_residue_max = phi12_residue_max.max(residue_at(surface, form, p)?.norm());
        }
    }
    Ok(PeriodReport {
        family: family.kind,
        lambda: family.lambda,
        c: family.c,
        cycle_integrals,
        residues,
        phi12_residue_max,
        residue_sum: sum.norm(),
        residual_norm,
    })
}
