use thiserror::Error;

/// Errors produced by the fitting, sampling and evaluation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension count overflow for n = {n}, degree = {degree}")]
    DimensionOverflow { n: usize, degree: usize },

    #[error("degree {0} exceeds the supported maximum of 255")]
    DegreeTooLarge(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "sample set is rank deficient for degree {degree}: basis column {column} has norm {norm:e} \
         below tolerance {tolerance:e}"
    )]
    RankDeficient {
        degree: usize,
        column: usize,
        norm: f64,
        tolerance: f64,
    },

    #[error("under-determined fit: {needed} samples needed, {available} available")]
    Underdetermined { needed: usize, available: usize },

    #[error("relaxation is infeasible: {0}")]
    Infeasible(String),

    #[error(
        "singular Hessian in the relaxation (monomial design of degree {degree} is rank deficient \
         on the samples, e.g. collinear points); use a regularization weight sigma > 0"
    )]
    SingularHessian { degree: usize },

    #[error("point {index} lies outside the domain")]
    OutOfDomain { index: usize },

    #[error("unknown test function `{0}`")]
    UnknownFunction(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
