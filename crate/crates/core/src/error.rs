//! Error type shared by all modules.

use crate::lattice::KroneckerResult;
use crate::poly::RationalPolynomial;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An atom was given a lag with a negative coordinate.
    #[error("negative lag: {0}")]
    NegativeLag(String),

    /// A lag expression with a negative generator coefficient.
    #[error("invalid lag expression: {0}")]
    InvalidLag(String),

    /// A lag does not decompose over the given generator basis.
    #[error("lag {0} is not representable in the delay lattice")]
    Decomposition(String),

    /// Measure lags or delays do not sit on the requested mesh.
    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),

    /// The Kronecker grid search ran out of budget before meeting the bound.
    /// Carries the best candidate found so far.
    #[error("search budget exhausted; best achieved epsilon {}", best.epsilon)]
    BudgetExceeded { best: KroneckerResult },

    /// The polynomials share a nonconstant factor; the factor is returned as
    /// evidence.
    #[error("polynomials are not coprime; gcd has degree {}", gcd.degree().unwrap_or(0))]
    NotCoprime { gcd: RationalPolynomial },

    /// The corona condition fails for this instance, so no Bezout identity
    /// exists. The common factor is returned as evidence.
    #[error("corona condition violated; common factor of degree {}", gcd.degree().unwrap_or(0))]
    CoronaViolated { gcd: RationalPolynomial },

    /// The point handed to the violation certifier is not a common
    /// generalized character zero of the instance.
    #[error(
        "not a common zero: measure {index} evaluates to magnitude {magnitude:.3e} (tolerance {tolerance:.3e})"
    )]
    NotACommonZero {
        index: usize,
        magnitude: f64,
        tolerance: f64,
    },

    /// The operation is defined only for a subclass of inputs (for example
    /// Bezout construction requires a single-generator lattice).
    #[error("unsupported case: {0}")]
    Unsupported(String),

    /// Vector or matrix dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}
