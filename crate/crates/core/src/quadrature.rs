//! Adaptive Gauss–Kronrod quadrature for complex-valued integrands, plus
//! line, polyline and circular contour integrals in the complex plane.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Absolute tolerance for the whole interval.
    pub abs_tol: f64,
    /// Maximum bisection depth.
    pub max_depth: u32,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_depth: 40,
        }
    }
}

impl QuadratureOptions {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<(Complex64, f64)>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = f(center)? * WGK[7];
    let mut gauss = Complex64::new(0.0, 0.0);
    gauss += (kronrod / WGK[7]) * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx)? + f(center + dx)?;
        kronrod += sum * WGK[j];
        if j % 2 == 1 {
            gauss += sum * WG[j / 2];
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    Ok((kronrod, (kronrod - gauss).norm()))
}

/// Integrates `f` over `[a, b]` by adaptive bisection. Each subinterval must
/// meet its share of `abs_tol`, proportional to its length.
pub fn integrate<F>(mut f: F, a: f64, b: f64, opts: QuadratureOptions) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let span = (b - a).abs();
    let mut total = Complex64::new(0.0, 0.0);
    let mut stack = vec![(a, b, 0u32)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let (value, err) = gk15(&mut f, lo, hi)?;
        let local_tol = opts.abs_tol * (hi - lo).abs() / span;
        if err <= local_tol || err < 1e-15 * value.norm() {
            total += value;
        } else if depth >= opts.max_depth {
            return Err(Error::QuadratureNonConvergence {
                estimate: err,
                tolerance: local_tol,
            });
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    Ok(total)
}

/// `∫ f(z) dz` along the straight segment `from -> to`.
pub fn line_integral<F>(mut f: F, from: Complex64, to: Complex64, opts: QuadratureOptions) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let dz = to - from;
    if dz.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let seg = QuadratureOptions {
        abs_tol: opts.abs_tol / dz.norm(),
        ..opts
    };
    Ok(integrate(|t| f(from + dz * t), 0.0, 1.0, seg)? * dz)
}

/// `∫ f(z) dz` along a polyline; each segment gets the full tolerance.
pub fn polyline_integral<F>(mut f: F, points: &[Complex64], opts: QuadratureOptions) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    points
        .windows(2)
        .try_fold(Complex64::new(0.0, 0.0), |acc, w| {
            Ok(acc + line_integral(&mut f, w[0], w[1], opts)?)
        })
}

/// `∮ f(z) dz` counter-clockwise around a circle by the trapezoid rule,
/// which converges geometrically for integrands analytic on an annulus.
pub fn circle_integral<F>(mut f: F, center: Complex64, radius: f64, nodes: usize) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..nodes {
        let theta = 2.0 * PI * k as f64 / nodes as f64;
        let dir = Complex64::from_polar(1.0, theta);
        // dz = i r e^{iθ} dθ
        acc += f(center + dir * radius)? * dir * Complex64::new(0.0, radius);
    }
    Ok(acc * (2.0 * PI / nodes as f64))
}
