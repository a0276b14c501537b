use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite argument {0}")]
    NonFinite(Complex64),

    #[error("{z} lies {distance:.3e} from a lattice pole (exclusion radius {radius:.3e})")]
    PoleProximity {
        z: Complex64,
        distance: f64,
        radius: f64,
    },

    #[error("series for {what} did not reach accuracy {target:.1e} within {terms} terms")]
    ConvergenceFailure {
        what: &'static str,
        target: f64,
        terms: usize,
    },

    #[error("addition theorem is singular at {0} (wp(z) equals wp at the half period)")]
    SingularAddition(Complex64),

    #[error("Gauss map has a pole at {0}")]
    GaussMapPole(Complex64),

    #[error("path segment from {from} to {to} passes within {radius:.3e} of puncture {puncture}")]
    PathThroughPole {
        from: Complex64,
        to: Complex64,
        puncture: Complex64,
        radius: f64,
    },

    #[error("adaptive quadrature stopped at error estimate {estimate:.3e} (tolerance {tolerance:.1e})")]
    QuadratureNonConvergence { estimate: f64, tolerance: f64 },

    #[error("contour of radius {radius} around {center} encloses or touches another singularity")]
    ContourCrossesSingularity { center: Complex64, radius: f64 },

    #[error("period integrals are not quadratic in lambda (fit residual {residual:.3e})")]
    FitDegeneracy { residual: f64 },

    #[error("scale constant radicand {value:.6e} is not positive at lambda = {lambda}")]
    NonpositiveRadicand { value: f64, lambda: f64 },

    #[error("sample {0} is too close to a puncture")]
    SampleNearPuncture(Complex64),

    #[error("puncture cutoff disks cover every grid point")]
    EmptySampling,

    #[error("argument-principle contour hit a zero or pole after {retries} target draws")]
    BoundaryHitsZero { retries: usize },

    #[error("degree counts disagree across targets: {0:?}")]
    DegreeDisagreement(Vec<i64>),

    #[error("{0}")]
    Unsupported(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
