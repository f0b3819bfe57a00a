//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point type the linear algebra, schedules and integrators are
/// generic over. Implemented for `f32` and `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Default finite-difference step as a fraction of the run duration.
    fn default_fd_fraction() -> Self;

    /// Converts an `f64` literal. Every literal in the crate fits both widths.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// A nominal tolerance, floored at what the type can resolve.
    #[inline]
    fn tolerance(nominal: f64) -> Self {
        let floor = Self::epsilon().to_f64().unwrap_or(0.0) * 1e3;
        Self::lit(nominal.max(floor))
    }
}

impl Real for f64 {
    fn default_fd_fraction() -> Self {
        1e-5
    }
}

impl Real for f32 {
    // cube root of f32 epsilon balances O(h^2) truncation against cancellation
    fn default_fd_fraction() -> Self {
        5e-3
    }
}

/// Complex scalar over a [`Real`].
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub(crate) fn cis<T: Real>(angle: T) -> C<T> {
    Complex::new(angle.cos(), angle.sin())
}

#[inline]
pub(crate) fn is_finite<T: Real>(z: C<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
