//! Scalar abstraction: the whole numeric core is generic over the real type.

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar type the toolkit computes with: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossless conversion from `f64` literals (panics only on NaN-free
    /// constants that genuinely cannot be represented, which none of ours are).
    fn from_f64_lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over the chosen scalar.
pub type C<T> = Complex<T>;

/// `0 + 0i`.
#[inline]
pub fn czero<T: Scalar>() -> C<T> {
    C::new(T::zero(), T::zero())
}

/// `1 + 0i`.
#[inline]
pub fn cone<T: Scalar>() -> C<T> {
    C::new(T::one(), T::zero())
}

/// `e^{j·phase}`.
#[inline]
pub fn cis<T: Scalar>(phase: T) -> C<T> {
    C::new(phase.cos(), phase.sin())
}
