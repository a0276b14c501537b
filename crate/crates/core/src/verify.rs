//! End-to-end verification of one family: lattice constants, identities,
//! period conditions, residues, curvature accounting and symmetry, gathered
//! into one report.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{lattice_sum, EvaluationConfig, SquareLattice};
use crate::error::{Error, Result};
use crate::identities::{self, IdentityCheck};
use crate::mesh::{self, DegreeReport, SamplingPlan};
use crate::period::{self, PeriodReport};
use crate::symmetry::{self, SymmetryReport};
use crate::weierstrass::{FamilyKind, Form, Surface, SurfaceFamily, W2};

pub const DEFAULT_RESOLUTION: usize = 200;
pub const DEFAULT_SEED: u64 = 20_240_601;
/// Relative tolerance on the curvature closure.
pub const CURVATURE_TOLERANCE: f64 = 0.02;
pub const PERIOD_TOLERANCE: f64 = 1e-8;
pub const SYMMETRY_TOLERANCE: f64 = 1e-7;
pub const IMMERSION_TOLERANCE: f64 = 1e-6;
pub const BASE_POINT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub family: FamilyKind,
    pub resolution: usize,
    pub cutoff: f64,
    /// Overrides the evaluator's series accuracy target.
    pub target_accuracy: Option<f64>,
    pub output_dir: PathBuf,
    pub report_format: ReportFormat,
    pub identity_samples: usize,
    pub symmetry_samples: usize,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(family: FamilyKind) -> Self {
        Self {
            family,
            resolution: DEFAULT_RESOLUTION,
            cutoff: mesh::DEFAULT_CUTOFF,
            target_accuracy: None,
            output_dir: PathBuf::from("."),
            report_format: ReportFormat::Json,
            identity_samples: 50,
            symmetry_samples: 50,
            seed: DEFAULT_SEED,
        }
    }

    pub fn evaluation_config(&self) -> EvaluationConfig {
        let mut config = EvaluationConfig::default();
        if let Some(t) = self.target_accuracy {
            config.target_accuracy = t;
        }
        config
    }

    /// Checks everything that can be checked before any computation.
    pub fn validate(&self) -> Result<()> {
        self.evaluation_config().validate()?;
        SamplingPlan::new(self.resolution, self.cutoff).validate(&self.evaluation_config())?;
        if self.identity_samples == 0 || self.symmetry_samples == 0 {
            return Err(Error::InvalidConfig("sample counts must be positive".into()));
        }
        Ok(())
    }

    pub fn lattice(&self) -> Result<SquareLattice> {
        match self.target_accuracy {
            None => SquareLattice::standard().cloned(),
            Some(_) => SquareLattice::new(self.evaluation_config()),
        }
    }
}

/// A computed value next to its published or exact counterpart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub name: String,
    pub computed: f64,
    pub published: f64,
    pub abs_deviation: f64,
    pub rel_deviation: f64,
    /// Bound on `rel_deviation` when `relative`, else on `abs_deviation`.
    pub tolerance: f64,
    pub relative: bool,
    pub pass: bool,
}

impl Comparison {
    pub fn absolute(name: &str, computed: f64, published: f64, tolerance: f64) -> Self {
        Self::build(name, computed, published, tolerance, false)
    }

    pub fn relative(name: &str, computed: f64, published: f64, tolerance: f64) -> Self {
        Self::build(name, computed, published, tolerance, true)
    }

    fn build(name: &str, computed: f64, published: f64, tolerance: f64, relative: bool) -> Self {
        let abs_deviation = (computed - published).abs();
        let rel_deviation = if published == 0.0 { abs_deviation } else { abs_deviation / published.abs() };
        let measured = if relative { rel_deviation } else { abs_deviation };
        Self {
            name: name.to_string(),
            computed,
            published,
            abs_deviation,
            rel_deviation,
            tolerance,
            relative,
            pass: measured <= tolerance,
        }
    }

    fn complex(name: &str, computed: Complex64, published: Complex64, tolerance: f64) -> [Self; 2] {
        [
            Self::absolute(&format!("{name}.re"), computed.re, published.re, tolerance),
            Self::absolute(&format!("{name}.im"), computed.im, published.im, tolerance),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub e1: f64,
    pub g2: f64,
    pub zeta_half: [f64; 2],
    pub zeta_half_i: [f64; 2],
    pub zeta_w2: [f64; 2],
    /// Legendre values, `g2 = 4 e1^2`, and `e1` against the lattice-sum
    /// oracle.
    pub checks: Vec<Comparison>,
}

pub fn constants_report(lattice: &SquareLattice) -> ConstantsReport {
    let k = lattice.constants();
    let c = Complex64::new;
    let mut checks = Vec::new();
    checks.extend(Comparison::complex("zeta_half", k.zeta_half, c(PI / 2.0, 0.0), 1e-10));
    checks.extend(Comparison::complex("zeta_half_i", k.zeta_half_i, c(0.0, -PI / 2.0), 1e-10));
    checks.extend(Comparison::complex("zeta_w2", k.zeta_w2, c(PI / 2.0, -PI / 2.0), 1e-10));
    checks.push(Comparison::relative("g2_over_e1_squared", k.g2 / (k.e1 * k.e1), 4.0, 1e-12));
    checks.push(Comparison::absolute(
        "e1_lattice_sum",
        k.e1,
        lattice_sum::e1(lattice_sum::DEFAULT_RADIUS),
        1e-9,
    ));
    ConstantsReport {
        e1: k.e1,
        g2: k.g2,
        zeta_half: [k.zeta_half.re, k.zeta_half.im],
        zeta_half_i: [k.zeta_half_i.re, k.zeta_half_i.im],
        zeta_w2: [k.zeta_w2.re, k.zeta_w2.im],
        checks,
    }
}

/// Closed-form `(lambda, c)` in their published form.
pub fn published_parameters(kind: FamilyKind, e1: f64) -> (Option<f64>, f64) {
    match kind {
        FamilyKind::ChenGackstatter => (None, (2.0 / e1) * (1.5 * PI).sqrt()),
        FamilyKind::Weber2 => (Some(3.0 * e1), (6.0 * PI / 7.0).sqrt() / e1),
        FamilyKind::Vilhena3 => (Some(3.0 * e1), (6.0 * PI / 73.0).sqrt() / e1),
    }
}

/// Published additive constants of the closed-form immersion.
pub fn published_additive_constants(kind: FamilyKind, e1: f64) -> Option<[f64; 3]> {
    match kind {
        FamilyKind::ChenGackstatter => None,
        FamilyKind::Weber2 => Some([3.0 * PI * PI / (7.0 * e1), 0.0, (6.0 * PI / 7.0).sqrt() * e1.ln()]),
        FamilyKind::Vilhena3 => {
            let k = 12.0 * PI * PI / (73.0 * e1);
            Some([k, k, 0.0])
        }
    }
}

/// The closed-form primitives as published, without additive constants.
/// Independent of the partial-fraction bookkeeping in [`Surface`].
pub fn published_primitive(surface: &Surface, z: Complex64) -> Result<Option<[f64; 3]>> {
    let lattice = surface.lattice();
    let e1 = lattice.e1();
    let c = surface.family().c;
    let half = Complex64::new(0.5, 0.0);
    let half_i = Complex64::new(0.0, 0.5);
    let v = lattice.eval(z)?;
    let zeta = lattice.zeta(z)?;
    let (bracket, x3) = match surface.family().kind {
        FamilyKind::ChenGackstatter => return Ok(None),
        FamilyKind::Weber2 => (
            v.wp1 / 6.0 - z * (14.0 / 3.0 * e1 * e1) + zeta * (4.0 * e1) - lattice.zeta(z - half)? * (4.0 * e1),
            (c / 2.0) * (v.wp.re - 2.0 * e1 * (v.wp - e1).norm().ln()),
        ),
        FamilyKind::Vilhena3 => (
            v.wp1 / 6.0 + lattice.zeta(z - half_i)? * (16.0 * e1)
                - lattice.zeta(z - half)? * (16.0 * e1)
                - z * (146.0 / 3.0 * e1 * e1),
            (c / 2.0) * (v.wp.re + 4.0 * e1 * ((v.wp + e1).norm() / (v.wp - e1).norm()).ln()),
        ),
    };
    let i = Complex64::i();
    let x1 = (-zeta - bracket * (c * c / 4.0)).re;
    let x2 = (-i * zeta + i * bracket * (c * c / 4.0)).re;
    Ok(Some([x1, x2, x3]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditiveConstant {
    pub coordinate: String,
    /// `-Re` of the published primitive at `(1+i)/2`.
    pub recomputed: f64,
    pub published: Option<f64>,
    pub abs_deviation: Option<f64>,
    pub rel_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paper_discrepancy: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyConstants {
    pub e1: f64,
    pub g2: f64,
    pub lambda: Option<f64>,
    pub lambda_over_e1: Option<f64>,
    pub c: f64,
    /// Lattice constants, `lambda`, `c` and the additive constants against
    /// their published values.
    pub checks: Vec<Comparison>,
    pub additive_constants: Vec<AdditiveConstant>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub expected: f64,
    /// `2 pi (2 - 2 genus - ends - Σ orders)`.
    pub jorge_meeks: f64,
    pub degree: DegreeReport,
    /// `-4 pi deg g`.
    pub degree_based: f64,
    /// Grid quadrature of `K dA` over the torus minus the cutoff disks.
    pub mesh_integrated: f64,
    pub mesh_rel_deviation: f64,
    /// Curvature inside each cutoff disk, in puncture order.
    pub excluded_ends: Vec<f64>,
    /// `mesh_integrated + Σ excluded_ends`.
    pub closure: f64,
    pub closure_rel_deviation: f64,
    pub resolution: usize,
    pub cutoff: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub family: FamilyKind,
    pub config: RunConfig,
    pub constants: FamilyConstants,
    pub lemma_checks: Vec<IdentityCheck>,
    pub period_report: PeriodReport,
    pub period_checks: Vec<Comparison>,
    pub curvature: CurvatureReport,
    pub symmetry: SymmetryReport,
    pub failed_checks: Vec<String>,
    pub overall: Verdict,
}

fn family_constants(surface: &Surface) -> Result<FamilyConstants> {
    let lattice = surface.lattice();
    let family = surface.family();
    let e1 = lattice.e1();
    let (lambda_pub, c_pub) = published_parameters(family.kind, e1);
    let mut checks = constants_report(lattice).checks;
    if let (Some(l), Some(lp)) = (family.lambda, lambda_pub) {
        checks.push(Comparison::absolute("lambda_over_e1", l / e1, lp / e1, 1e-9));
    }
    checks.push(Comparison::relative("c", family.c, c_pub, 1e-10));

    let published = published_additive_constants(family.kind, e1);
    let at_w2 = published_primitive(surface, W2)?;
    let mut additive_constants = Vec::new();
    if let (Some(p), Some(f)) = (published, at_w2) {
        for k in 0..3 {
            let recomputed = -f[k];
            let cmp = Comparison::absolute(&format!("additive_x{}", k + 1), recomputed, p[k], 1e-9);
            additive_constants.push(AdditiveConstant {
                coordinate: format!("x{}", k + 1),
                recomputed,
                published: Some(p[k]),
                abs_deviation: Some(cmp.abs_deviation),
                rel_deviation: Some(cmp.rel_deviation),
                paper_discrepancy: (!cmp.pass).then(|| format!("published {} but normalization gives {recomputed}", p[k])),
            });
            checks.push(cmp);
        }
    } else {
        for (k, v) in surface.additive_constants().iter().enumerate() {
            additive_constants.push(AdditiveConstant {
                coordinate: format!("x{}", k + 1),
                recomputed: *v,
                published: None,
                abs_deviation: None,
                rel_deviation: None,
                paper_discrepancy: None,
            });
        }
    }
    Ok(FamilyConstants {
        e1,
        g2: lattice.constants().g2,
        lambda: family.lambda,
        lambda_over_e1: family.lambda.map(|l| l / e1),
        c: family.c,
        checks,
        additive_constants,
    })
}

fn max_coordinate_diff(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|k| (a[k] - b[k]).abs()).fold(0.0, f64::max)
}

/// Immersion-level checks: closed form against quadrature, base point, the
/// published primitives, and for the three-end surface the expanded forms.
pub fn immersion_checks(surface: &Surface, seed: u64) -> Result<Vec<IdentityCheck>> {
    let points = identities::sample_points_avoiding(20, seed, 0.05, &surface.family().punctures);
    let mut numeric = 0.0f64;
    for &z in &points {
        let closed = surface.immersion_closed(z)?.x;
        let quad = surface.immersion_numeric(z, None)?.x;
        numeric = numeric.max(max_coordinate_diff(closed, quad));
    }
    let mut out = vec![
        IdentityCheck::new("immersion_closed_vs_numeric", numeric, IMMERSION_TOLERANCE),
        IdentityCheck::new(
            "base_point_normalized",
            surface.immersion_closed(W2)?.x.iter().fold(0.0f64, |m, v| m.max(v.abs())),
            BASE_POINT_TOLERANCE,
        ),
    ];
    if let Some(constants) = published_additive_constants(surface.family().kind, surface.lattice().e1()) {
        let mut dev = 0.0f64;
        for &z in &points {
            if let Some(p) = published_primitive(surface, z)? {
                let published = [p[0] + constants[0], p[1] + constants[1], p[2] + constants[2]];
                dev = dev.max(max_coordinate_diff(published, surface.immersion_closed(z)?.x));
            }
        }
        out.push(IdentityCheck::new("published_immersion", dev, 1e-8));
    }
    let family = surface.family();
    if let (FamilyKind::Vilhena3, Some(lambda)) = (family.kind, family.lambda) {
        let mut dev = 0.0f64;
        for &z in &points {
            let expanded = identities::expanded_three_end_forms(surface.lattice(), z, lambda, family.c)?;
            let forms = surface.phi_forms(z)?;
            for form in Form::ALL {
                let a = expanded.get(form);
                dev = dev.max((a - forms.get(form)).norm() / a.norm().max(1.0));
            }
        }
        out.push(IdentityCheck::new("three_end_forms_expanded", dev, 1e-9));
    }
    Ok(out)
}

/// Expected `Res phi3` per puncture, in puncture order.
pub fn expected_residues(kind: FamilyKind, c: f64, e1: f64) -> Vec<f64> {
    match kind {
        FamilyKind::ChenGackstatter => vec![0.0],
        FamilyKind::Weber2 => vec![-2.0 * c * e1, 2.0 * c * e1],
        FamilyKind::Vilhena3 => vec![-4.0 * c * e1, 0.0, 4.0 * c * e1],
    }
}

fn period_checks(surface: &Surface, report: &PeriodReport) -> Vec<Comparison> {
    let family = surface.family();
    let e1 = surface.lattice().e1();
    let mut out = vec![
        Comparison::absolute("period_residual", report.residual_norm, 0.0, PERIOD_TOLERANCE),
        Comparison::absolute("phi12_residues", report.phi12_residue_max, 0.0, PERIOD_TOLERANCE),
        Comparison::absolute("residue_sum", report.residue_sum, 0.0, PERIOD_TOLERANCE),
    ];
    for (entry, expected) in report.residues.iter().zip(expected_residues(family.kind, family.c, e1)) {
        let name = format!("residue_phi3_at_{}_{}", entry.puncture[0], entry.puncture[1]);
        out.push(Comparison::absolute(&format!("{name}.re"), entry.re, expected, PERIOD_TOLERANCE));
        out.push(Comparison::absolute(&format!("{name}.im"), entry.im, 0.0, PERIOD_TOLERANCE));
    }
    out
}

pub fn curvature_report(surface: &Surface, plan: &SamplingPlan, seed: u64) -> Result<CurvatureReport> {
    let kind = surface.family().kind;
    let jorge_meeks = period::jorge_meeks_total_curvature(1, &kind.end_orders());
    let degree = mesh::degree_of_gauss_map(surface, seed)?;
    let degree_based = -4.0 * PI * degree.degree as f64;
    let built = mesh::build_mesh(plan, surface)?;
    let mesh_integrated = built.total_curvature().unwrap_or(f64::NAN);
    let excluded_ends = mesh::excluded_end_curvature(surface, plan.puncture_cutoff)?;
    let closure = mesh_integrated + excluded_ends.iter().sum::<f64>();
    let expected = jorge_meeks;
    let closure_rel_deviation = ((closure - expected) / expected).abs();
    Ok(CurvatureReport {
        expected,
        jorge_meeks,
        degree_based,
        degree,
        mesh_integrated,
        mesh_rel_deviation: ((mesh_integrated - expected) / expected).abs(),
        excluded_ends,
        closure,
        closure_rel_deviation,
        resolution: plan.resolution,
        cutoff: plan.puncture_cutoff,
        tolerance: CURVATURE_TOLERANCE,
        pass: (degree_based - jorge_meeks).abs() <= 1e-12 * jorge_meeks.abs()
            && closure_rel_deviation <= CURVATURE_TOLERANCE,
    })
}

/// The solved surface for a family under the given lattice.
pub fn solved_surface(kind: FamilyKind, lattice: &SquareLattice) -> Result<Surface> {
    Surface::new(period::solved_family(kind, lattice)?, lattice.clone())
}

pub fn verify(config: &RunConfig) -> Result<VerificationReport> {
    config.validate()?;
    let lattice = config.lattice()?;
    let surface = solved_surface(config.family, &lattice)?;

    let constants = family_constants(&surface)?;
    let mut lemma_checks = identities::all_checks(&lattice, config.identity_samples, config.seed)?;
    lemma_checks.extend(immersion_checks(&surface, config.seed)?);
    let period_report = period::period_report(&surface)?;
    let period_checks = period_checks(&surface, &period_report);
    let plan = SamplingPlan::new(config.resolution, config.cutoff);
    let curvature = curvature_report(&surface, &plan, config.seed)?;
    let samples = identities::sample_points(config.symmetry_samples, config.seed.wrapping_add(2), 0.05);
    let symmetry = symmetry::symmetry_check(&surface, &samples, SYMMETRY_TOLERANCE)?;

    let mut failed_checks = Vec::new();
    for c in constants.checks.iter().chain(&period_checks) {
        if !c.pass {
            failed_checks.push(c.name.clone());
        }
    }
    for c in &lemma_checks {
        if !c.pass && !c.informational {
            failed_checks.push(c.id.clone());
        }
    }
    if !curvature.pass {
        failed_checks.push("curvature".into());
    }
    if !symmetry.pass {
        failed_checks.push("symmetry".into());
    }
    let overall = if failed_checks.is_empty() { Verdict::Pass } else { Verdict::Fail };
    Ok(VerificationReport {
        family: config.family,
        config: config.clone(),
        constants,
        lemma_checks,
        period_report,
        period_checks,
        curvature,
        symmetry,
        failed_checks,
        overall,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootEntry {
    pub value: f64,
    pub over_e1: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateRoot {
    pub lambda: f64,
    pub c: f64,
    /// Family whose data the degenerate root reproduces, if any.
    pub reproduces: Option<FamilyKind>,
    /// Largest difference of `g` and of the scale constant against that
    /// family at sample points.
    pub gauss_map_deviation: f64,
    pub c_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub family: FamilyKind,
    pub e1: f64,
    pub roots: Vec<RootEntry>,
    /// Monic balance quadratic `[c0, c1, 1]`.
    pub balance_monic: Option<[f64; 3]>,
    pub lambda: Option<f64>,
    pub c: f64,
    pub c_closed_form: f64,
    pub cross_check_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate: Option<DegenerateRoot>,
}

/// Period solution with the closed-form cross-check and, on request, an
/// analysis of the degenerate root `lambda = e1`.
pub fn solve_report(kind: FamilyKind, lattice: &SquareLattice, degenerate: bool) -> Result<SolveReport> {
    let e1 = lattice.e1();
    let (roots, balance_monic, lambda) = if kind.has_lambda() {
        let sol = period::solve_lambda(kind, lattice)?;
        let lambda = sol.admissible().ok_or(Error::FitDegeneracy { residual: sol.fit_residual })?;
        let roots = sol
            .roots
            .iter()
            .map(|r| RootEntry {
                value: r.value,
                over_e1: r.value / e1,
                degenerate: r.degenerate,
            })
            .collect();
        (roots, Some(sol.balance_monic), Some(lambda))
    } else {
        (Vec::new(), None, None)
    };
    let c = period::solve_c(kind, lambda.unwrap_or(e1), lattice)?;
    let c_closed_form = kind.closed_form_c(e1, lambda.unwrap_or(e1))?;
    let degenerate = match (degenerate, kind) {
        (true, FamilyKind::Vilhena3) => Some(degenerate_root(lattice)?),
        (true, _) => {
            return Err(Error::Unsupported(format!("{kind} has no degenerate root to analyse")));
        }
        (false, _) => None,
    };
    Ok(SolveReport {
        family: kind,
        e1,
        roots,
        balance_monic,
        lambda,
        c,
        c_closed_form,
        cross_check_deviation: ((c - c_closed_form) / c_closed_form).abs(),
        degenerate,
    })
}

/// At `lambda = e1` the three-end datum collapses; compares it with the
/// solved Weber datum.
fn degenerate_root(lattice: &SquareLattice) -> Result<DegenerateRoot> {
    let e1 = lattice.e1();
    let lambda = e1;
    let c = period::solve_c(FamilyKind::Vilhena3, lambda, lattice)?;
    let three = Surface::new(SurfaceFamily::vilhena3(lambda, c, e1), lattice.clone())?;
    let weber = solved_surface(FamilyKind::Weber2, lattice)?;
    let mut dev = 0.0f64;
    for z in identities::sample_points(20, 5, 0.05) {
        let a = three.gauss_map(z)?;
        let b = weber.gauss_map(z)?;
        dev = dev.max((a - b).norm() / b.norm().max(1.0));
    }
    let c_deviation = ((c - weber.family().c) / weber.family().c).abs();
    Ok(DegenerateRoot {
        lambda,
        c,
        reproduces: (dev <= 1e-10 && c_deviation <= 1e-10).then_some(FamilyKind::Weber2),
        gauss_map_deviation: dev,
        c_deviation,
    })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One row per check: `section,name,value,reference,deviation,tolerance,pass`.
pub fn report_to_csv(report: &VerificationReport) -> String {
    let mut s = String::from("section,name,value,reference,deviation,tolerance,pass\n");
    let mut row = |section: &str, name: &str, value: f64, reference: f64, deviation: f64, tolerance: f64, pass: bool| {
        let _ = writeln!(
            s,
            "{section},{},{value:e},{reference:e},{deviation:e},{tolerance:e},{pass}",
            csv_field(name)
        );
    };
    for c in &report.constants.checks {
        let dev = if c.relative { c.rel_deviation } else { c.abs_deviation };
        row("constants", &c.name, c.computed, c.published, dev, c.tolerance, c.pass);
    }
    for c in &report.lemma_checks {
        let section = if c.informational { "lemma_informational" } else { "lemma" };
        row(section, &c.id, c.max_residual, 0.0, c.max_residual, c.tolerance, c.pass);
    }
    for c in &report.period_checks {
        row("period", &c.name, c.computed, c.published, c.abs_deviation, c.tolerance, c.pass);
    }
    let k = &report.curvature;
    row("curvature", "jorge_meeks", k.jorge_meeks, k.expected, (k.jorge_meeks - k.expected).abs(), 0.0, true);
    row(
        "curvature",
        "degree_based",
        k.degree_based,
        k.jorge_meeks,
        (k.degree_based - k.jorge_meeks).abs(),
        1e-12,
        (k.degree_based - k.jorge_meeks).abs() <= 1e-12 * k.jorge_meeks.abs(),
    );
    row(
        "curvature_informational",
        "mesh_integrated",
        k.mesh_integrated,
        k.expected,
        k.mesh_rel_deviation,
        k.tolerance,
        k.mesh_rel_deviation <= k.tolerance,
    );
    row("curvature", "closure", k.closure, k.expected, k.closure_rel_deviation, k.tolerance, k.closure_rel_deviation <= k.tolerance);
    let y = &report.symmetry;
    row("symmetry", "group_order", y.group_order as f64, 8.0, (y.group_order as f64 - 8.0).abs(), 0.0, y.group.pass());
    row("symmetry", "max_deviation", y.max_deviation, 0.0, y.max_deviation, y.tolerance, y.max_deviation <= y.tolerance);
    let pass = report.overall == Verdict::Pass;
    row("overall", "overall", pass as u8 as f64, 1.0, (!pass) as u8 as f64, 0.0, pass);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparison_modes() {
        let c = Comparison::relative("x", 1.0 + 1e-11, 1.0, 1e-10);
        assert!(c.pass);
        let c = Comparison::absolute("x", 2.0, 0.0, 1.0);
        assert!(!c.pass);
        assert_eq!(c.rel_deviation, 2.0);
    }

    #[test]
    fn constants_hold() {
        let r = constants_report(SquareLattice::standard().unwrap());
        for c in &r.checks {
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn published_primitives_fix_the_base_point() {
        let lattice = SquareLattice::standard().unwrap();
        for kind in [FamilyKind::Weber2, FamilyKind::Vilhena3] {
            let s = solved_surface(kind, lattice).unwrap();
            let constants = family_constants(&s).unwrap();
            for a in &constants.additive_constants {
                assert!(a.abs_deviation.unwrap() < 1e-9, "{kind} {a:?}");
            }
        }
    }

    #[test]
    fn degenerate_root_is_weber() {
        let r = solve_report(FamilyKind::Vilhena3, SquareLattice::standard().unwrap(), true).unwrap();
        let d = r.degenerate.unwrap();
        assert_eq!(d.reproduces, Some(FamilyKind::Weber2));
        assert!(r.cross_check_deviation <= 1e-10);
    }

    #[test]
    fn csv_quotes_commas() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("ab"), "ab");
    }
}
