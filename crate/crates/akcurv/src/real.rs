//! Scalar abstraction.
//!
//! Everything numerical in this crate is generic over a floating-point
//! scalar so that the same code instantiates at `f32` and `f64` (the crate
//! root exports `f64` aliases for the common types). Two traits split the
//! requirements:
//!
//! * [`Scalarlike`] — bare field arithmetic plus a pivot magnitude. This is
//!   all the generic matrix routines need, and it is also implemented by
//!   the jet types so metric inverses can be differentiated.
//! * [`Real`] — a genuine floating-point scalar with transcendental
//!   functions and constants, used everywhere geometry happens.

use std::fmt::{Debug, Display};
use std::ops::{Div, Neg, Sub};

use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Field arithmetic plus a pivot magnitude for Gaussian elimination.
///
/// Implemented by the float scalars and by the jet types; the magnitude of
/// a jet is the magnitude of its value part, so pivot choices never depend
/// on derivative entries.
pub trait Scalarlike:
    Copy
    + num_traits::Zero
    + num_traits::One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Div<Output = Self>
{
    /// Magnitude used for pivot selection.
    fn mag(self) -> f64;
}

impl Scalarlike for f32 {
    fn mag(self) -> f64 {
        self.abs() as f64
    }
}

impl Scalarlike for f64 {
    fn mag(self) -> f64 {
        self.abs()
    }
}

/// Floating-point scalar for geometric computation.
///
/// The supertraits supply arithmetic, comparisons, transcendental
/// functions and π; the two provided methods convert through `f64`, which
/// is how literal constants enter generic code.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Scalarlike
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Inject an `f64` constant into the scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant must convert")
    }

    /// Extract the value as `f64` (lossless for `f64`, rounded for `f32`).
    fn as_f64(self) -> f64 {
        self.to_f64().expect("float converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// π² in the scalar type.
pub fn pi_squared<R: Real>() -> R {
    R::PI() * R::PI()
}
