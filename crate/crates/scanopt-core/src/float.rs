//! Scalar abstraction: the whole crate is generic over `f32` or `f64`.

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar used throughout the crate.
///
/// Blanket-implemented for every type satisfying the bounds, in practice
/// `f32` and `f64`.
pub trait Real:
    Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + std::iter::Sum + 'static
{
    /// Lift an `f64` literal into the scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal must be representable")
    }

    /// Degrees to radians.
    fn to_radians_from_deg(self) -> Self {
        self * Self::of(std::f64::consts::PI / 180.0)
    }

    /// Radians to degrees.
    fn to_degrees_from_rad(self) -> Self {
        self * Self::of(180.0 / std::f64::consts::PI)
    }

    /// The constant π.
    fn pi() -> Self {
        Self::of(std::f64::consts::PI)
    }

    /// Two π, one full turn.
    fn tau() -> Self {
        Self::of(std::f64::consts::TAU)
    }
}

impl<T> Real for T where
    T: Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + std::iter::Sum + 'static
{
}
