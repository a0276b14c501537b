use std::f64::consts::PI;

use wpmin_core::elliptic::SquareLattice;
use wpmin_core::verify::{self, ReportFormat, RunConfig, Verdict};
use wpmin_core::weierstrass::FamilyKind;
use wpmin_core::Error;

fn lattice() -> &'static SquareLattice {
    SquareLattice::standard().unwrap()
}

fn quick(kind: FamilyKind) -> RunConfig {
    let mut config = RunConfig::new(kind);
    config.resolution = 100;
    config.identity_samples = 10;
    config.symmetry_samples = 10;
    config
}

#[test]
fn every_family_verifies() {
    for kind in FamilyKind::ALL {
        let report = verify::verify(&quick(kind)).unwrap();
        assert_eq!(report.overall, Verdict::Pass, "{kind}: {:?}", report.failed_checks);
        assert!(report.failed_checks.is_empty());
        assert!(report.period_report.residual_norm <= verify::PERIOD_TOLERANCE);
    }
}

#[test]
fn three_end_report_contents() {
    let report = verify::verify(&quick(FamilyKind::Vilhena3)).unwrap();
    let e1 = lattice().e1();
    let lambda = report.period_report.lambda.unwrap();
    assert!((lambda / e1 - 3.0).abs() < 1e-9);
    assert!((report.curvature.jorge_meeks + 16.0 * PI).abs() < 1e-12);
    assert_eq!(report.curvature.degree.degree, 4);
    assert!(report.curvature.closure_rel_deviation < verify::CURVATURE_TOLERANCE);
    assert_eq!(report.curvature.excluded_ends.len(), 3);
}

#[test]
fn weber_curvature() {
    let report = verify::verify(&quick(FamilyKind::Weber2)).unwrap();
    assert!((report.curvature.expected + 12.0 * PI).abs() < 1e-12);
    assert!((report.curvature.degree_based + 12.0 * PI).abs() < 1e-12);
}

#[test]
fn invalid_configs_fail_before_computing() {
    let mut config = quick(FamilyKind::Weber2);
    config.resolution = 3;
    assert!(matches!(verify::verify(&config), Err(Error::InvalidConfig(_))));
    let mut config = quick(FamilyKind::Weber2);
    config.target_accuracy = Some(-1.0);
    assert!(matches!(config.validate(), Err(Error::InvalidConfig(_))));
}

#[test]
fn csv_has_one_row_per_check() {
    let mut config = quick(FamilyKind::ChenGackstatter);
    config.report_format = ReportFormat::Csv;
    let report = verify::verify(&config).unwrap();
    let csv = verify::report_to_csv(&report);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "section,name,value,reference,deviation,tolerance,pass");
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() > 10);
    assert!(rows.iter().all(|r| r.ends_with(",true") || r.ends_with(",false")));
}

#[test]
fn solve_reports() {
    let weber = verify::solve_report(FamilyKind::Weber2, lattice(), false).unwrap();
    assert!(weber.cross_check_deviation < 1e-9);
    assert!(weber.degenerate.is_none());
    let degenerate = verify::solve_report(FamilyKind::Vilhena3, lattice(), true).unwrap().degenerate.unwrap();
    assert_eq!(degenerate.reproduces, Some(FamilyKind::Weber2));
    assert!(degenerate.gauss_map_deviation < 1e-9);
    assert!(matches!(
        verify::solve_report(FamilyKind::ChenGackstatter, lattice(), true),
        Err(Error::Unsupported(_))
    ));
}
