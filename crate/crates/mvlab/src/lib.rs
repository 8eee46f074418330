//! Exact-arithmetic toolkit for the moment varieties of inverse Gaussian and
//! gamma distributions and their mixtures.
//!
//! The crate is organized around a small exact-computation core and a set of
//! geometry/statistics modules built on top of it:
//!
//! - [`algebra`]: arbitrary-precision rationals, sparse multivariate
//!   polynomials, and fraction-free exact linear algebra.
//! - [`moments`]: exact moments of the inverse Gaussian and gamma
//!   distributions, Bessel polynomials, mixture moment maps, and
//!   homogeneous parametrizations of the moment surfaces.
//! - [`minors`]: the 3×d moment matrices and their maximal minors, which cut
//!   out the moment varieties as determinantal ideals.
//! - [`secant`]: certified secant-variety dimension checks via exact Jacobian
//!   rank at random rational points.
//! - [`blowup`]: indeterminacy loci of the parametrizations and their
//!   resolution by chains of point blowups, tracking multiplicities.
//! - [`picard`]: the integer Picard lattice of the resolved surfaces, with
//!   the diagonal intersection pairing, closed-form divisor classes, degree
//!   checks, and negative-intersection reduction ledgers.
//! - [`estimate`]: a floating-point method-of-moments estimator for
//!   k-mixtures with multi-start Newton / Levenberg-Marquardt solving and
//!   empirical identifiability reports.
//!
//! Every algebraic verdict produced by this crate (vanishing of minors,
//! Jacobian ranks, blowup multiplicities, intersection numbers) is computed
//! in exact rational arithmetic; floating point is confined to the estimator.
//!
//! See the `examples/` directory for one runnable walkthrough per major
//! capability, and the `mvlab` binary for a scriptable JSON interface.

pub mod algebra;
pub mod blowup;
pub mod estimate;
pub mod minors;
pub mod moments;
pub mod picard;
pub mod rng;
pub mod secant;

pub use algebra::{MultiPoly, RationalMatrix};
pub use moments::{Family, GammaParams, IGParams, MixtureParams, MomentVector};
