//! Scalar abstractions shared by the numeric modules.
//!
//! Threshold factors only need field arithmetic, so they are written against
//! [`Scalar`] and can be evaluated exactly with [`crate::Rational`]. Everything
//! that needs `sqrt`, `floor` or infinities uses [`Real`] (`f32` or `f64`).

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Field-like scalar: floating point or exact rational.
pub trait Scalar: Num + Copy + PartialOrd + FromPrimitive + Debug {}

impl<T> Scalar for T where T: Num + Copy + PartialOrd + FromPrimitive + Debug {}

/// Floating-point scalar used by the full procedures.
pub trait Real: Scalar + Float + ToPrimitive + Display + Sum + Send + Sync + 'static {}

impl<T> Real for T where T: Scalar + Float + ToPrimitive + Display + Sum + Send + Sync + 'static {}

/// Converts a count or literal into the scalar type.
///
/// Every supported scalar represents small integers and `f64` literals, so a
/// failed conversion is a bug in the caller.
#[inline]
pub(crate) fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

#[inline]
pub(crate) fn count<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}
