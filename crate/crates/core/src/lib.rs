//! Exact combinatorics and symbolic mirror construction for smooth hypertoric varieties.

#![allow(clippy::needless_range_loop)]

pub mod arrangement;
pub mod linalg;
pub mod mirror;
pub mod multiplicative;
pub mod symbolic;
pub mod tropical;
