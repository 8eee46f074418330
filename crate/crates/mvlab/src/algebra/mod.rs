//! Exact rational algebra: sparse multivariate polynomials and fraction-free
//! linear algebra over arbitrary-precision rationals.
//!
//! All values are immutable after construction; every operation is a pure
//! function, so everything here can be shared freely across threads.

mod matrix;
mod poly;

pub use matrix::RationalMatrix;
pub use poly::{common_factor, rational_roots, univariate_gcd, MultiPoly};

use thiserror::Error;

/// Errors raised by the exact-algebra layer.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    /// An evaluation point did not assign a value to a used variable.
    #[error("no value assigned to variable `{0}`")]
    MissingAssignment(String),
    /// A named variable does not belong to the polynomial's ring.
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    /// Multiplicity of the zero polynomial is undefined.
    #[error("the zero polynomial has no finite multiplicity")]
    ZeroPolynomial,
    /// Common factor of an all-zero family is undefined.
    #[error("common factor of an all-zero family is undefined")]
    AllZeroFamily,
    /// Gcd of two zero polynomials is undefined.
    #[error("gcd(0, 0) is undefined")]
    GcdOfZeros,
    /// An operation expected univariate input.
    #[error("expected a univariate polynomial, found variables {0:?}")]
    NotUnivariate(Vec<String>),
    /// Text-format parsing failed.
    #[error("polynomial parse error: {0}")]
    Parse(String),
}
