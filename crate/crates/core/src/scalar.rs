//! Scalar abstraction for the numerical core.
//!
//! Everything in this crate is generic over a real floating-point type `T`
//! implementing [`Real`]; complex amplitudes are `num_complex::Complex<T>`.
//! The crate root exports `f64`-concrete aliases, which is what the harness
//! and CLI use. All frequencies and rates are angular, in rad/ns (a rate
//! quoted as "x GHz" enters as `x`), and times are in ns.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps, ToPrimitive};

/// Complex number over the crate's scalar type.
pub type C<T> = Complex<T>;

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + Sum<Self>
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Conversion from an `f64` literal, for numeric constants in generic code.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant not representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar not representable as f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A purely real complex number.
#[inline]
pub fn re<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// A purely imaginary complex number.
#[inline]
pub fn im<T: Real>(x: T) -> C<T> {
    Complex::new(T::zero(), x)
}
