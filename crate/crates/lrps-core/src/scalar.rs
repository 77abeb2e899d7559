//! Scalar abstraction over the floating-point element type.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, NumAssign, NumCast};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Floating-point scalar the kernels are generic over: `f32` or `f64`.
pub trait Scalar:
    Float + NumAssign + NumCast + Sum + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Draws one standard-normal sample from `rng`.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn from_f64(value: f64) -> Self {
        NumCast::from(value).expect("f64 conversion")
    }

    fn from_usize(value: usize) -> Self {
        NumCast::from(value).expect("usize conversion")
    }

    fn to_f64(self) -> f64 {
        NumCast::from(self).expect("finite scalar")
    }
}

impl Scalar for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

impl Scalar for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}
