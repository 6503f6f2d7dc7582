use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Scalar sample type: `f32` or `f64`.
///
/// All distance computations are generic over this trait; the file formats
/// and the experiment harness pin it to `f64`.
pub trait Sample: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Lossy cast from `f64`, used by the synthetic generators.
    fn from_f64_lossy(v: f64) -> Self {
        Self::from(v).expect("finite f64 converts to any float sample type")
    }
}

impl<T> Sample for T where T: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}
