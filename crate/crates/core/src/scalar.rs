use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar the numeric core is generic over: `f32` or `f64`.
///
/// Math methods (`sqrt`, `ln`, `powf`, ...) come from [`nalgebra::ComplexField`]
/// through the [`RealField`] supertrait.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`.
    fn of(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("f64 converts to every Real")
    }

    /// Widening conversion to `f64`.
    fn f64(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("every Real converts to f64")
    }

    fn of_usize(v: usize) -> Self {
        Self::of(v as f64)
    }

    fn finite(self) -> bool {
        self.f64().is_finite()
    }
}

impl Real for f32 {}
impl Real for f64 {}
