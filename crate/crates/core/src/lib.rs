//! Analysis toolkit for linear controlled delayed difference equations (LCDDE)
//! and the convolution algebra of Dirac-sum measures behind them.
//!
//! The crate has two halves that meet in the frequency domain:
//!
//! * an exact layer — finite sums of Dirac masses on the nonpositive
//!   half-line with rational weights ([`measure`]), lag decompositions over a
//!   rationally independent generator basis ([`lattice`]), rational
//!   polynomials with extended Euclid ([`poly`]), and exact rational linear
//!   algebra ([`ratmat`]);
//! * a numeric layer — corona lower-bound scans and violation certificates
//!   ([`corona`]), Bezout cofactor construction ([`bezout`]), the Hautus-type
//!   frequency criterion for L1 exact controllability ([`hautus`]), and a
//!   method-of-steps simulator with a finite reachability operator ([`sim`]).
//!
//! All scans are deterministic: grids are fixed, reductions use lexicographic
//! tie-breaks, and torus points are canonicalized under complex conjugation so
//! half-torus scans reproduce full scans bit for bit.

pub mod bezout;
pub mod corona;
pub mod error;
pub mod hautus;
pub mod lag;
pub mod lattice;
pub mod measure;
pub mod poly;
pub mod ratmat;
pub mod rational;
pub mod scan;
pub mod sim;

pub use error::Error;
pub use lag::{Lag, LabelValues};
pub use lattice::{DelayDecomposition, Generator, GeneratorBasis, KroneckerResult};
pub use measure::{Atom, DiracSumMeasure, PiecewiseConstant};
pub use poly::RationalPolynomial;
pub use rational::Rational;

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
