//! Exact integer and rational linear algebra.

mod feasibility;
mod matrix;

pub use feasibility::{
    feasible_fourier_motzkin, feasible_simplex, rational_feasible, Constraint, LinearSystem,
    Relation, FM_MAX_DIMENSION,
};
pub use matrix::{content, hermite_rows, reduce_modulo, subsets, IntMatrix, KernelLattice, Minor};

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is {rows}x{cols}, not square")]
    NotSquare { rows: usize, cols: usize },
    #[error("minor order must be positive")]
    NonPositiveOrder,
    #[error("minor order {k} exceeds {max}")]
    OrderTooLarge { k: usize, max: usize },
}

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}
