//! Laurent polynomials, rational functions and logarithmic forms over ℚ in named variables.
//!
//! Kähler parameters are ordinary variables that are never treated as coordinates, so
//! `q3` may appear in a coefficient position or inside a denominator like any symbol.

mod gcd;
mod logform;
mod monomial;
mod poly;
mod rational;

pub use gcd::{exact_div, poly_gcd};
pub use logform::{dlog, LogForm};
pub use monomial::{Monomial, Var};
pub use poly::LaurentPoly;
pub use rational::{ParamScalar, RationalFn};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolicError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("logarithmic derivative of zero")]
    LogOfZero,
    #[error("substitution for `{0}` is zero but appears with a negative exponent")]
    ZeroSubstitution(String),
}
