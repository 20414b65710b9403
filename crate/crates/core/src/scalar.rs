//! Numeric abstraction for similarity and path scores.
//!
//! Scores are ratios of small integers (substring lengths, edge-weight sums),
//! so the same code runs over binary floats and exact rationals. Tests use
//! the rational instantiation as an independent arithmetic check.

use std::fmt::Debug;

use num_traits::{FromPrimitive, Num};

/// A scalar type that can carry a similarity or path score.
pub trait Scalar: Num + FromPrimitive + PartialOrd + Clone + Debug {
    /// Builds `numerator / denominator`. `denominator` must be non-zero.
    fn ratio(numerator: usize, denominator: usize) -> Self {
        Self::from_count(numerator) / Self::from_count(denominator)
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Lossy conversion used when reporting scores over JSON.
    fn to_f64(&self) -> f64;
}

impl Scalar for f32 {
    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for num_rational::Ratio<i64> {
    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

impl Scalar for num_rational::Ratio<i128> {
    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}
