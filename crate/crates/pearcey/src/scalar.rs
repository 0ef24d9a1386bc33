use num_traits::{Float, FromPrimitive, NumAssign};
use std::fmt::Debug;

/// Real scalar used by the generic numerical kernels.
pub trait Real: Float + FromPrimitive + NumAssign + Debug + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}
