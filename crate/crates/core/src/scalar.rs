//! Floating-point scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar the optimizers, oracles and problems are generic over.
///
/// Implemented for `f32` and `f64`. The harness and the on-disk formats are
/// fixed to `f64`; the core math works with either.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal or computed constant into `Self`.
    #[inline]
    fn lit(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("f64 is representable in every Real")
    }

    /// Widens to `f64` for hashing, serialization and reporting.
    #[inline]
    fn to_f64_lossless(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).expect("Real always widens to f64")
    }

    /// Converts a count into `Self`.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::lit(n as f64)
    }
}

impl Real for f32 {}
impl Real for f64 {}
