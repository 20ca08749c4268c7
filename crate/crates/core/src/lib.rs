//! Numerical laboratory for oscillating sequences and their disjointness from
//! polynomial skew products on the torus.
//!
//! The crate is organized by concern:
//!
//! - [`seqgen`]: Möbius sieve, exponential sequences `e(α βⁿ g(β))` with a
//!   certified high-precision kernel, sequence files, growth checks.
//! - [`torus`]: affine maps and polynomial skew products on `T^d`, characters,
//!   trigonometric polynomials, integer-matrix tools (HNF, unipotent
//!   triangularization).
//! - [`orbitpoly`]: exact expansion of lifted orbits as rational polynomials in
//!   `n`, Faulhaber sums, binomial/monomial phase conversion.
//! - [`averaging`]: Cesàro averages, Weyl sums via phasor chains, arithmetic
//!   progression sums, Chowla correlations, mean-attraction averages.
//! - [`equidist`]: star discrepancy, Weyl-criterion battery, β-sampling
//!   experiment.

pub mod acceptance;
pub mod averaging;
pub mod bigfloat;
pub mod equidist;
pub mod error;
pub mod phasor;
pub mod real;
pub mod scalar;
pub mod seqgen;
pub mod orbitpoly;
pub mod torus;

pub use error::{Error, Result};
