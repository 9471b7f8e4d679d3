//! Scalar abstraction for the numerical kernels.
//!
//! All core math is generic over a floating-point scalar so the same code
//! runs in `f64` (the default) or `f32`. Concrete aliases live at the crate
//! root.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + serde::Serialize
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Lift an `f64` literal into the working scalar type.
#[inline]
pub fn lit<S: Real>(x: f64) -> S {
    S::from_f64(x).expect("literal out of range for scalar type")
}

/// Lift a small integer into the working scalar type.
#[inline]
pub fn int<S: Real>(n: i64) -> S {
    S::from_i64(n).expect("integer out of range for scalar type")
}

/// Lossy view of a scalar as `f64`, for error messages and reports.
#[inline]
pub fn as_f64<S: Real>(x: S) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
