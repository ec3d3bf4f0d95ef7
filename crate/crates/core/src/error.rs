use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("unsupported parameters: {0}")]
    UnsupportedParameters(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("{function} has a pole at {at}")]
    Pole { function: &'static str, at: String },

    #[error("series did not converge after {terms} terms (last residual {residual:e})")]
    SeriesNonConvergence { terms: usize, residual: f64 },

    #[error("quadrature tolerance not met: best value {value}, error estimate {err_estimate:e}")]
    QuadratureTolerance { value: Complex64, err_estimate: f64 },

    #[error("x = {x} lies inside the singular band |x| < {band}")]
    SingularRegion { x: f64, band: f64 },

    #[error("input has the wrong parity: residual {0:e}")]
    ParityViolation(f64),

    #[error("truncation rule violated: {0}")]
    Truncation(String),

    #[error("eta = {eta} lies outside the strip |eta| < {half_width}")]
    OutsideStrip { eta: f64, half_width: f64 },

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("moment integrals dominated by the grid edge: {0}")]
    UnreliableTail(String),

    #[error("finite-difference estimate unreliable: {0}")]
    Unreliable(String),

    #[error("values below the floating-point floor: {0}")]
    RangeShrink(String),

    #[error("zero input")]
    ZeroInput,
}

impl Error {
    /// Short machine-readable tag, used by the CLI error object.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameters(_) => "invalid_parameters",
            Error::UnsupportedParameters(_) => "unsupported_parameters",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::InvalidExponent(_) => "invalid_exponent",
            Error::Pole { .. } => "pole",
            Error::SeriesNonConvergence { .. } => "series_non_convergence",
            Error::QuadratureTolerance { .. } => "quadrature_tolerance",
            Error::SingularRegion { .. } => "singular_region",
            Error::ParityViolation(_) => "parity_violation",
            Error::Truncation(_) => "truncation",
            Error::OutsideStrip { .. } => "outside_strip",
            Error::Calibration(_) => "calibration",
            Error::UnreliableTail(_) => "unreliable_tail",
            Error::Unreliable(_) => "unreliable",
            Error::RangeShrink(_) => "range_shrink",
            Error::ZeroInput => "zero_input",
        }
    }
}
