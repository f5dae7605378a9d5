//! Scalar abstraction for weights, LP values and bounds.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the whole library is generic over.
///
/// The associated tolerances are per-type: `f64` uses the tolerances the
/// certification layer is specified against, `f32` uses coarser ones that
/// track its epsilon.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Absolute tolerance for weight comparisons.
    const WEIGHT_TOL: Self;
    /// Slack below which a cut of value `1 - CUT_TOL` counts as violated.
    const CUT_TOL: Self;
    /// Subtracted before taking ceilings of fractional out-degrees, so that
    /// noise like `2.0000000003` still yields a cap of `2`.
    const CEIL_NUDGE: Self;
    /// Pivot and pricing threshold for the dense simplex.
    const PIVOT_TOL: Self;

    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("constant not representable in scalar type")
    }
}

impl Scalar for f64 {
    const WEIGHT_TOL: Self = 1e-9;
    const CUT_TOL: Self = 1e-7;
    const CEIL_NUDGE: Self = 1e-6;
    const PIVOT_TOL: Self = 1e-9;
}

impl Scalar for f32 {
    const WEIGHT_TOL: Self = 1e-4;
    const CUT_TOL: Self = 1e-4;
    const CEIL_NUDGE: Self = 1e-3;
    const PIVOT_TOL: Self = 1e-5;
}
