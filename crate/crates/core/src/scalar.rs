use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssign};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real floating-point scalar the whole crate is generic over (`f32` or `f64`).
pub trait Scalar:
    Float
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + FromStr
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal, rounding to the nearest representable value.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
