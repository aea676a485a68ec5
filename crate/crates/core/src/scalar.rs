//! Scalar abstraction for the numerical core.
//!
//! Everything numeric downstream is generic over [`Real`], which is any
//! floating-point type nalgebra can run its (complex) linear algebra over and
//! num-traits can convert literals into. In practice: `f32` or `f64`.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar the core is generic over.
///
/// `RealField` brings the transcendental and ordering operations plus the
/// complex-field machinery nalgebra's eigensolvers need; `FromPrimitive` /
/// `ToPrimitive` bridge literals and diagnostics.
pub trait Real: RealField + FromPrimitive + ToPrimitive + Copy + Default {}

impl<T: RealField + FromPrimitive + ToPrimitive + Copy + Default> Real for T {}

/// Shorthand for the complex numbers over a [`Real`] scalar.
pub type C<T> = Complex<T>;

/// Converts an `f64` literal into `T`. Panics only if `T` cannot represent
/// any approximation of `x`, which never happens for f32/f64.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal must convert into the scalar type")
}

/// Converts a `usize` count into `T` exactly (counts here stay far below the
/// mantissa limit of f32).
#[inline]
pub fn count<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count must convert into the scalar type")
}

/// `x` as f64 for error reports and logs.
#[inline]
pub fn report<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Purely real complex number.
#[inline]
pub fn cr<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// Purely imaginary complex number.
#[inline]
pub fn ci<T: Real>(x: T) -> C<T> {
    Complex::new(T::zero(), x)
}

/// |z| for a complex number over a generic scalar (`Complex::norm` itself
/// demands `num_traits::Float`, which `Real` does not).
#[inline]
pub fn cmod<T: Real>(z: C<T>) -> T {
    z.norm_sqr().sqrt()
}

/// e^{iθ} over a generic scalar (`Complex::exp` demands `Float`).
#[inline]
pub fn cis<T: Real>(theta: T) -> C<T> {
    Complex::new(theta.cos(), theta.sin())
}
