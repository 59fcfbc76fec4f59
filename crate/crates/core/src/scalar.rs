//! Scalar abstraction for the sample type.
//!
//! Everything numeric in this crate is generic over [`Scalar`], which is any
//! float-like type from `num-traits` (`f32` and `f64` in practice). Concrete
//! aliases for the common instantiations live at the crate root.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Sample type the core algorithms operate on.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Lossy view as `f64`, used at serialization and reporting boundaries.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Sum + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

/// Converts an `f64` constant into the working scalar type.
///
/// Panics only for exotic scalar types that cannot represent `f64` at all;
/// `f32`/`f64` conversions always succeed.
pub fn from_f64<T: Scalar>(value: f64) -> T {
    T::from_f64(value).expect("scalar type must be convertible from f64")
}
