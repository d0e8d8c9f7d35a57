//! Scalar abstractions shared by every operator container.
//!
//! [`Coefficient`] is the ring-like bound used by projector algebra, so exact
//! rational arithmetic can build the same projectors as `f64`. [`Real`] adds
//! the field operations needed for transporters, norms and eigensolvers.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::RealField;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};

/// Ring of operator entries.
pub trait Coefficient:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Neg<Output = Self>
{
    /// The value `num / den`. `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Absolute value as `f64`, used for residual reporting.
    fn magnitude(&self) -> f64;
}

impl Coefficient for f64 {
    #[inline]
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    #[inline]
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Coefficient for f32 {
    #[inline]
    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }
    #[inline]
    fn magnitude(&self) -> f64 {
        self.abs() as f64
    }
}

impl Coefficient for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn magnitude(&self) -> f64 {
        self.to_f64().map(f64::abs).unwrap_or(f64::INFINITY)
    }
}

/// Floating-point scalars: `f32` and `f64`.
pub trait Real:
    Coefficient + RealField + Copy + FromPrimitive + ToPrimitive + Display + LowerExp
{
    /// Default relative tolerance for iterative eigensolvers.
    const SOLVER_TOL: f64;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const SOLVER_TOL: f64 = 1e-10;
}

impl Real for f32 {
    const SOLVER_TOL: f64 = 1e-5;
}
