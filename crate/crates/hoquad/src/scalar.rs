//! Scalar abstraction for the geometry kernel.
//!
//! All curve and mesh math is generic over [`Real`], which is satisfied by
//! `f32` and `f64`. The pipeline and I/O layers instantiate everything with
//! `f64` through the aliases at the crate root.

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable by the geometry kernel.
pub trait Real:
    Float
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Default
    + Debug
    + Display
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Default
        + Debug
        + Display
        + 'static
{
}

/// Converts an `f64` literal into the working scalar type.
#[inline]
pub fn real<R: Real>(v: f64) -> R {
    R::from_f64(v).expect("literal must be representable")
}

/// `value / denom`, or zero when the denominator underflows.
#[inline]
pub fn safe_div<R: Real>(value: R, denom: R) -> R {
    if denom == R::zero() {
        R::zero()
    } else {
        value / denom
    }
}
