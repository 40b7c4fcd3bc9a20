//! Scalar abstraction shared by the matrix kernel and everything built on it.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating point type the kernel is generic over (`f32` or `f64`).
///
/// Each implementation carries its own numerical tolerances. The `f64` values
/// are the ones every invariant in this crate is stated against; the `f32`
/// values are scaled to single precision.
pub trait Real:
    Float + FloatConst + FromPrimitive + Sum + Default + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Hermiticity, unit trace, and Kraus completeness tolerance.
    const EXACT_TOL: f64;
    /// Smallest eigenvalue still accepted as positive semidefinite.
    /// Eigenvalues in `[-PSD_TOL, 0)` are clipped to zero before logarithms.
    const PSD_TOL: f64;
    /// Off-diagonal Frobenius mass that terminates the Jacobi sweeps.
    const JACOBI_TOL: f64;
    /// Outcome probability below which a measurement branch is degenerate.
    const DEGENERATE_PROB: f64;

    /// Converts an `f64` literal into this type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }
}

impl Real for f64 {
    const EXACT_TOL: f64 = 1e-12;
    const PSD_TOL: f64 = 1e-10;
    const JACOBI_TOL: f64 = 1e-14;
    const DEGENERATE_PROB: f64 = 1e-14;
}

impl Real for f32 {
    const EXACT_TOL: f64 = 1e-5;
    const PSD_TOL: f64 = 1e-5;
    const JACOBI_TOL: f64 = 1e-6;
    const DEGENERATE_PROB: f64 = 1e-6;
}
