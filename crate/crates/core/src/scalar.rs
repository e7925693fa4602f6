//! Floating-point scalar bundle used by the numeric kernels.

use num_traits::{Float, FloatConst, FromPrimitive, NumCast};
use std::fmt::Debug;

pub trait Real: Float + FloatConst + FromPrimitive + NumCast + Debug + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal fits scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}
