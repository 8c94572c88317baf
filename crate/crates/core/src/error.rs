//! Error taxonomy shared by every module.

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by callers that map failures to exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Rejected input: domain violations, invalid specs, degenerate data.
    Precondition,
    /// A computed object failed its own certificate.
    Certification,
    /// An iterative method ran out of budget before meeting its tolerance.
    NonConvergence,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {0} lies outside the open unit disk")]
    OutsideDisk(Complex64),

    #[error("unknown space name `{0}` (valid: hardy, dirichlet, bergman, korenblum)")]
    UnknownSpace(String),

    #[error("invalid phi spec: {0}")]
    InvalidPhiSpec(String),

    #[error("invalid weight sequence: {0}")]
    InvalidWeights(String),

    #[error("zero configurations may not contain the origin")]
    ZeroAtOrigin,

    #[error("{0}")]
    Precondition(String),

    #[error("kernel series did not certify its tail within the term budget (|w z| = {rho})")]
    SeriesDivergence { rho: f64 },

    #[error(
        "Gram matrix is numerically singular: kernel nodes {index_a} ({node_a}) and {index_b} ({node_b}) are linearly dependent at working precision (pivot ratio {pivot_ratio:.3e})"
    )]
    DegenerateGram {
        index_a: usize,
        node_a: Complex64,
        index_b: usize,
        node_b: Complex64,
        pivot_ratio: f64,
    },

    #[error("Gram system condition estimate {estimate:.3e} exceeds 1e14; interpolation certificates are unattainable in double precision")]
    IllConditioned { estimate: f64 },

    #[error("certification failed for {context}: residual {residual:.3e} at index {index} exceeds tolerance {tol:.3e}")]
    CertificationFailed {
        context: &'static str,
        index: usize,
        residual: f64,
        tol: f64,
    },

    #[error("weight-ratio supremum not resolved from the computed range; cannot bound the operator norm")]
    RatioSupUnresolved,

    #[error("metric projection did not converge within {iterations} iterations (worst orthogonality residual {residual:.3e})")]
    ProjectionDiverged {
        iterations: usize,
        residual: f64,
        last_iterate: Vec<Complex64>,
        residuals: Vec<f64>,
    },

    #[error("{context} did not converge: {detail}")]
    NonConvergence {
        context: &'static str,
        detail: String,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::OutsideDisk(_)
            | Error::UnknownSpace(_)
            | Error::InvalidPhiSpec(_)
            | Error::InvalidWeights(_)
            | Error::ZeroAtOrigin
            | Error::Precondition(_)
            | Error::DegenerateGram { .. } => ErrorKind::Precondition,
            Error::CertificationFailed { .. } => ErrorKind::Certification,
            Error::SeriesDivergence { .. }
            | Error::IllConditioned { .. }
            | Error::RatioSupUnresolved
            | Error::ProjectionDiverged { .. }
            | Error::NonConvergence { .. } => ErrorKind::NonConvergence,
        }
    }
}
