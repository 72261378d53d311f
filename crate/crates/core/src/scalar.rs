use std::fmt::{Debug, Display};
use std::iter::Sum;

use ndarray::ScalarOperand;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar backing all operator arithmetic.
///
/// Implemented for `f32` and `f64`. The CLI and the stated tolerances assume
/// `f64`; `f32` is available for quick low-precision scans.
pub trait RealScalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + ScalarOperand
    + Sum
    + Display
    + Debug
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, for tolerances and literal coefficients.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal must convert")
    }
}

impl RealScalar for f32 {}
impl RealScalar for f64 {}
