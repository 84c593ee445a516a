use num_complex::Complex64;
use thiserror::Error;

use crate::shuffle::FormLabel;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("modulus tau must have positive imaginary part, got {0}")]
    InvalidTau(Complex64),

    #[error("form {form} evaluated at {point} is within {distance:e} of its pole at {pole}")]
    PoleProximity {
        form: FormLabel,
        point: Complex64,
        pole: Complex64,
        distance: f64,
    },

    #[error("argument {0} is at a lattice point")]
    LatticePoint(Complex64),

    #[error("label {0} is missing from the differential structure tables")]
    MissingTableEntry(String),

    #[error("path segments do not join: {0} != {1}")]
    EndpointMismatch(Complex64, Complex64),

    #[error("path passes within {distance:e} of puncture {puncture} at {position}")]
    PathNearPuncture {
        puncture: usize,
        position: Complex64,
        distance: f64,
    },

    #[error("series depths differ: {0} vs {1}")]
    DepthMismatch(usize, usize),

    #[error("series letter counts differ: {0} vs {1}")]
    LetterMismatch(usize, usize),

    #[error("series has zero constant term and cannot be inverted")]
    ZeroConstantTerm,

    #[error("adaptive quadrature did not reach tolerance {tol:e} within {max_intervals} sub-intervals")]
    ToleranceNotMet { tol: f64, max_intervals: usize },

    #[error("puncture {0} is not a good puncture: {1}")]
    NotGoodPuncture(usize, String),

    #[error("form {form} has a pole of order > 1 or residue {residue} at puncture {puncture}")]
    HigherOrderPole {
        form: FormLabel,
        puncture: usize,
        residue: Complex64,
    },

    #[error("forms {0} and {1} share a pole")]
    SharedPoles(FormLabel, FormLabel),

    #[error("no basis form with poles at punctures {0} and {1}; the product expansion needs a form outside the basis")]
    DecompositionUnavailable(usize, usize),

    #[error("variation at position {position} of a word of length {len}: boundary positions are not supported")]
    BoundaryPosition { position: usize, len: usize },

    #[error("punctures {0} and {1} coincide")]
    CoincidentPunctures(usize, usize),

    #[error("asymptotic fit residual {residual:e} exceeds tolerance {tol:e}")]
    FitResidual { residual: f64, tol: f64 },

    #[error("associator depends on the probe point: max coefficient drift {drift:e} exceeds {tol:e}")]
    ProbeDependence { drift: f64, tol: f64 },

    #[error("finite-difference perturbation collides: {0}")]
    PerturbationCollision(String),

    #[error("unsupported request: {0}")]
    Unsupported(String),
}

impl Error {
    /// Whether the error stems from the request itself rather than from a
    /// numerical procedure falling short.
    pub fn is_configuration(&self) -> bool {
        !matches!(
            self,
            Error::ToleranceNotMet { .. }
                | Error::FitResidual { .. }
                | Error::ProbeDependence { .. }
                | Error::PoleProximity { .. }
                | Error::LatticePoint(_)
                | Error::ZeroConstantTerm
        )
    }
}
