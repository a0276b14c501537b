//! Ambient symmetries induced by the reflection `beta` and the quarter turn
//! `rho` of the torus about `w2 = (1+i)/2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weierstrass::{FamilyKind, Surface, W2};

pub type Mat3 = [[f64; 3]; 3];

pub const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
/// `(x1, x2, x3) -> (x1, -x2, x3)`
pub const A_BETA: Mat3 = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
/// `(x1, x2, x3) -> (-x2, x1, -x3)`
pub const A_RHO: Mat3 = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]];

pub fn mul(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

pub fn apply(a: &Mat3, x: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| (0..3).map(|k| a[i][k] * x[k]).sum())
}

pub fn det(a: &Mat3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

fn transpose(a: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

fn close(a: &Mat3, b: &Mat3) -> bool {
    (0..3).all(|i| (0..3).all(|j| (a[i][j] - b[i][j]).abs() < 1e-12))
}

/// Closure of `generators` under multiplication, identity first.
pub fn generate_group(generators: &[Mat3]) -> Vec<Mat3> {
    let mut group = vec![IDENTITY];
    let mut frontier = vec![IDENTITY];
    while let Some(g) = frontier.pop() {
        for h in generators {
            let p = mul(h, &g);
            if !group.iter().any(|q| close(q, &p)) {
                group.push(p);
                frontier.push(p);
            }
        }
    }
    group
}

/// The eight matrices generated by [`A_BETA`] and [`A_RHO`].
pub fn dihedral_group() -> Vec<Mat3> {
    generate_group(&[A_BETA, A_RHO])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupCheck {
    pub order: usize,
    pub rho_order_four: bool,
    pub beta_involution: bool,
    pub dihedral_relation: bool,
    pub orthogonal: bool,
}

impl GroupCheck {
    pub fn pass(&self) -> bool {
        self.order == 8 && self.rho_order_four && self.beta_involution && self.dihedral_relation && self.orthogonal
    }
}

pub fn group_check() -> GroupCheck {
    let group = dihedral_group();
    let rho2 = mul(&A_RHO, &A_RHO);
    let rho3 = mul(&rho2, &A_RHO);
    let rho4 = mul(&rho3, &A_RHO);
    GroupCheck {
        order: group.len(),
        rho_order_four: close(&rho4, &IDENTITY) && !close(&rho2, &IDENTITY),
        beta_involution: close(&mul(&A_BETA, &A_BETA), &IDENTITY),
        dihedral_relation: close(&mul(&mul(&A_BETA, &A_RHO), &A_BETA), &rho3),
        orthogonal: group.iter().all(|g| close(&mul(g, &transpose(g)), &IDENTITY)),
    }
}

/// `rho(w2 + z) = w2 + i z`
pub fn rho(z: Complex64) -> Complex64 {
    W2 + Complex64::i() * (z - W2)
}

/// `beta(w2 + z) = w2 + conj(z)`
pub fn beta(z: Complex64) -> Complex64 {
    W2 + (z - W2).conj()
}

/// A straight curve in the fundamental domain whose image should satisfy a
/// linear constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicCurve {
    pub name: &'static str,
    pub start: Complex64,
    pub direction: Complex64,
    pub range: (f64, f64),
    pub constraint: Constraint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// In the `(x1, x3)` plane.
    X2Zero,
    /// In the `(x2, x3)` plane.
    X1Zero,
    /// On the line `x1 = x2, x3 = 0`.
    DiagonalLine,
    /// On the line `x1 = -x2, x3 = 0`.
    AntiDiagonalLine,
}

impl Constraint {
    pub fn deviation(self, x: [f64; 3]) -> f64 {
        match self {
            Constraint::X2Zero => x[1].abs(),
            Constraint::X1Zero => x[0].abs(),
            Constraint::DiagonalLine => (x[0] - x[1]).abs().max(x[2].abs()),
            Constraint::AntiDiagonalLine => (x[0] + x[1]).abs().max(x[2].abs()),
        }
    }
}

/// The eight curves on which the three-end surface has planar geodesics or
/// straight lines.
pub fn geodesic_curves() -> [GeodesicCurve; 8] {
    let c = Complex64::new;
    let curve = |name, start, direction, range, constraint| GeodesicCurve {
        name,
        start,
        direction,
        range,
        constraint,
    };
    [
        curve("real_axis_left", c(0.0, 0.0), c(1.0, 0.0), (0.0, 0.5), Constraint::X2Zero),
        curve("real_axis_right", c(0.0, 0.0), c(1.0, 0.0), (0.5, 1.0), Constraint::X2Zero),
        curve("half_height", c(0.0, 0.5), c(1.0, 0.0), (0.0, 1.0), Constraint::X2Zero),
        curve("imaginary_axis_lower", c(0.0, 0.0), c(0.0, 1.0), (0.0, 0.5), Constraint::X1Zero),
        curve("imaginary_axis_upper", c(0.0, 0.0), c(0.0, 1.0), (0.5, 1.0), Constraint::X1Zero),
        curve("half_width", c(0.5, 0.0), c(0.0, 1.0), (0.0, 1.0), Constraint::X1Zero),
        curve("anti_diagonal", c(0.0, 1.0), c(1.0, -1.0), (0.0, 1.0), Constraint::AntiDiagonalLine),
        curve("diagonal", c(0.0, 0.0), c(1.0, 1.0), (0.0, 1.0), Constraint::DiagonalLine),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicCheck {
    pub curve: String,
    pub constraint: Constraint,
    pub samples: usize,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub group: GroupCheck,
    pub group_order: usize,
    pub samples: usize,
    pub beta_max_deviation: f64,
    /// `None` for families whose puncture set is not invariant under `rho`.
    pub rho_max_deviation: Option<f64>,
    pub geodesics: Vec<GeodesicCheck>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Sample points along a curve, at distance at least `margin` from every
/// puncture.
pub fn curve_samples(surface: &Surface, curve: &GeodesicCurve, count: usize, margin: f64) -> Vec<Complex64> {
    let (t0, t1) = curve.range;
    (0..count)
        .map(|k| t0 + (t1 - t0) * (k as f64 + 0.5) / count as f64)
        .map(|t| curve.start + curve.direction * t)
        .filter(|&z| surface.family().puncture_distance(z) >= margin)
        .collect()
}

/// Checks `X∘beta = A_beta X` (all families) and, for the three-end
/// surface, `X∘rho = A_rho X` and the geodesic constraints.
pub fn symmetry_check(surface: &Surface, samples: &[Complex64], tolerance: f64) -> Result<SymmetryReport> {
    let kind = surface.family().kind;
    let with_rho = kind == FamilyKind::Vilhena3;
    let margin = surface.lattice().config().pole_exclusion_radius;
    let mut beta_dev = 0.0f64;
    let mut rho_dev = 0.0f64;
    for &z in samples {
        let mut images = vec![beta(z)];
        if with_rho {
            images.push(rho(z));
        }
        if std::iter::once(z).chain(images.iter().copied()).any(|w| surface.family().puncture_distance(w) < margin) {
            return Err(Error::SampleNearPuncture(z));
        }
        let x = surface.immersion_closed(z)?.x;
        let xb = surface.immersion_closed(beta(z))?.x;
        beta_dev = beta_dev.max(max_diff(xb, apply(&A_BETA, x)));
        if with_rho {
            let xr = surface.immersion_closed(rho(z))?.x;
            rho_dev = rho_dev.max(max_diff(xr, apply(&A_RHO, x)));
        }
    }
    let mut geodesics = Vec::new();
    if with_rho {
        for curve in geodesic_curves() {
            let pts = curve_samples(surface, &curve, 40, 0.02);
            let mut dev = 0.0f64;
            for &z in &pts {
                dev = dev.max(curve.constraint.deviation(surface.immersion_closed(z)?.x));
            }
            geodesics.push(GeodesicCheck {
                curve: curve.name.to_string(),
                constraint: curve.constraint,
                samples: pts.len(),
                max_deviation: dev,
            });
        }
    }
    let group = group_check();
    let max_deviation = geodesics
        .iter()
        .map(|g| g.max_deviation)
        .fold(beta_dev.max(rho_dev), f64::max);
    Ok(SymmetryReport {
        group_order: group.order,
        pass: group.pass() && max_deviation <= tolerance,
        group,
        samples: samples.len(),
        beta_max_deviation: beta_dev,
        rho_max_deviation: with_rho.then_some(rho_dev),
        geodesics,
        max_deviation,
        tolerance,
    })
}

fn max_diff(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|k| (a[k] - b[k]).abs()).fold(0.0, f64::max)
}
