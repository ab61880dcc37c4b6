//! Floating-point scalar abstraction shared by the real-valued parts of the
//! toolkit (search, provisioning, routing, clustering).

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar type the analysis is generic over. Implemented for `f32`
/// and `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal representable in scalar type")
    }

    fn from_count(value: u64) -> Self {
        Self::from_u64(value).expect("count representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Relative slack used when snapping a value that is an integer up to
/// floating-point noise (e.g. `0.016 * 1000.0`).
const SNAP_REL: f64 = 1e-9;

fn snapped<T: Scalar>(value: T) -> Option<T> {
    let nearest = value.round();
    let tol = T::lit(SNAP_REL) * value.abs().max(T::one());
    ((value - nearest).abs() <= tol).then_some(nearest)
}

/// Seconds to whole milliseconds, rounding up.
pub fn ceil_ms<T: Scalar>(seconds: T) -> u64 {
    let ms = seconds * T::lit(1000.0);
    let whole = snapped(ms).unwrap_or_else(|| ms.ceil());
    whole.max(T::zero()).to_u64().unwrap_or(u64::MAX)
}

/// Seconds to whole milliseconds, rounding down.
pub fn floor_ms<T: Scalar>(seconds: T) -> u64 {
    let ms = seconds * T::lit(1000.0);
    let whole = snapped(ms).unwrap_or_else(|| ms.floor());
    whole.max(T::zero()).to_u64().unwrap_or(u64::MAX)
}

/// Rounds a non-negative real count up to an integer.
pub fn ceil_count<T: Scalar>(value: T) -> u64 {
    let whole = snapped(value).unwrap_or_else(|| value.ceil());
    whole.max(T::zero()).to_u64().unwrap_or(u64::MAX)
}
