//! Scalar abstraction for the numerical kernels.
//!
//! Everything in this crate that does real arithmetic is generic over [`Real`],
//! which is `f64` or `f32` in practice. The driver and CLI pin `f64`; the `f32`
//! instantiation exists mainly to keep the kernels honest about precision
//! assumptions (tolerances are expressed through `epsilon()` where they matter).

use std::fmt;
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

/// Floating-point scalar used throughout the library.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + fmt::Debug
    + fmt::Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Shorthand conversion from an `f64` literal. Panics only if the target
    /// type cannot represent any `f64` at all, which none of our scalars do.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal must convert into scalar type")
    }

    /// Twice the unit roundoff; convenience for convergence tests.
    fn eps() -> Self {
        Self::epsilon()
    }
}

impl Real for f64 {}
impl Real for f32 {}
