use thiserror::Error;

use crate::solver::Regime;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("grid solves are two-dimensional; got n = {0}")]
    UnsupportedDimension(usize),
    #[error("resolution too coarse: {cells:.2} cells across the inradius, need at least 8")]
    ResolutionTooCoarse { cells: f64 },
    #[error("invalid mask: {0}")]
    InvalidMask(String),
    #[error("scale factor must be positive, got {0}")]
    NonpositiveScale(f64),
    #[error("no convergence after {iterations} iterations (last residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("negative value {value} raised to fractional power {p}")]
    NegativeValueWithFractionalPower { value: f64, p: f64 },
    #[error("functional denominator vanishes")]
    ZeroDenominator,
    #[error("iterate lost positivity (min value {min:.3e})")]
    NonPositiveIterate { min: f64 },
    #[error("domain kind `{0}` is not convex; check refused")]
    NonConvexDomainRefused(String),
    #[error("shooting parameter could not be bracketed")]
    NoBracket,
    #[error("p = {p} is {regime:?} in dimension {n}; shooting refused")]
    SupercriticalRefused { n: usize, p: f64, regime: Regime },
    #[error("solution did not return to zero before r = {r_max}")]
    NoZeroFound { r_max: f64 },
    #[error("rearrangement requires a nonnegative field (min {min:.3e})")]
    NegativeField { min: f64 },
    #[error("inner domain is not contained in the outer domain")]
    NotNested,
    #[error("point ({x}, {y}) is not strictly inside the domain")]
    PointOutsideDomain { x: f64, y: f64 },
    #[error("domain kind `{0}` has no distance oracle")]
    UnsupportedKind(String),
    #[error("path count must be positive")]
    InvalidPathCount,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDomain(_) => "invalid_domain",
            Error::UnsupportedDimension(_) => "unsupported_dimension",
            Error::ResolutionTooCoarse { .. } => "resolution_too_coarse",
            Error::InvalidMask(_) => "invalid_mask",
            Error::NonpositiveScale(_) => "nonpositive_scale",
            Error::NoConvergence { .. } => "no_convergence",
            Error::NegativeValueWithFractionalPower { .. } => "negative_value_with_fractional_power",
            Error::ZeroDenominator => "zero_denominator",
            Error::NonPositiveIterate { .. } => "nonpositive_iterate",
            Error::NonConvexDomainRefused(_) => "nonconvex_domain_refused",
            Error::NoBracket => "no_bracket",
            Error::SupercriticalRefused { .. } => "supercritical_refused",
            Error::NoZeroFound { .. } => "no_zero_found",
            Error::NegativeField { .. } => "negative_field",
            Error::NotNested => "not_nested",
            Error::PointOutsideDomain { .. } => "point_outside_domain",
            Error::UnsupportedKind(_) => "unsupported_kind",
            Error::InvalidPathCount => "invalid_path_count",
            Error::InvalidInput(_) => "invalid_input",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
