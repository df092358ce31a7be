//! Scalar abstraction for the geometric core.

use num_traits::{Float, FromPrimitive, NumCast, ToPrimitive};

/// Floating-point scalar usable as a coordinate type.
///
/// Geometry, generators, and certificates are generic over this trait so the
/// same routines run on `f32` and `f64`. Implementors must be IEEE-754 binary
/// floats: the exact predicates widen coordinates to `f64` losslessly and
/// decode them into scaled integers, and both steps rely on that layout.
pub trait Coord:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumCast
    + core::fmt::Debug
    + core::fmt::Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Widen to `f64` without changing the represented value.
    #[inline]
    fn widen(self) -> f64 {
        self.to_f64().expect("IEEE float widens to f64")
    }

    /// Narrow from `f64`, rounding to the nearest representable value.
    #[inline]
    fn narrow(x: f64) -> Self {
        NumCast::from(x).expect("finite f64 narrows to coordinate type")
    }
}

impl Coord for f32 {}
impl Coord for f64 {}
