//! Crate-wide error type.
//!
//! Hypothesis violations (wrong prime, divisibility, malformed form) are
//! ordinary input errors. `Consistency` is reserved for conditions that can
//! only arise from a bug in the library itself: a failed group axiom, a
//! decision that disagrees with its own witness, and the like. `Overflow` is
//! reported whenever an intermediate would exceed the supported integer
//! width; results are never silently wrapped.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("prime {0} must be odd")]
    EvenPrime(u64),

    #[error("primes must be distinct, got {0} twice")]
    EqualPrimes(u64),

    #[error("prime {p} divides n = {n}")]
    PrimeDividesN { p: u64, n: u64 },

    #[error("prime {p} divides the polynomial discriminant {disc}")]
    PrimeDividesDisc { p: u64, disc: i128 },

    #[error("Jacobi symbol modulus must be odd and positive, got {0}")]
    BadJacobiModulus(u64),

    #[error("polynomial is identically zero modulo {0}")]
    ZeroPolynomialMod(u64),

    #[error(
        "root finding modulo {p} is only supported below 2^20, \
         or for quartics of the shape a(x^2+1)^2 + e"
    )]
    RootBoundExceeded { p: u64 },

    #[error("polynomial discriminant requires degree >= 1")]
    ConstantPolynomial,

    #[error("{0} is not a negative discriminant congruent to 0 or 1 mod 4")]
    BadDiscriminant(i64),

    #[error("form ({a}, {b}, {c}) is not positive definite")]
    NotPositiveDefinite { a: i64, b: i64, c: i64 },

    #[error("form ({a}, {b}, {c}) is imprimitive")]
    Imprimitive { a: i64, b: i64, c: i64 },

    #[error("forms have different discriminants: {0} vs {1}")]
    MismatchedDiscriminants(i64, i64),

    #[error("matrix determinant must be +1 or -1, got {0}")]
    NotUnimodular(i128),

    #[error("no equivalent form with leading coefficient coprime to {0} in the search radius")]
    NoCoprimeRepresentative(i64),

    #[error("internal consistency fault: {0}")]
    Consistency(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
