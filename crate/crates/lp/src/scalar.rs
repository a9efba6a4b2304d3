use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Numeric field the simplex engine runs over.
///
/// Floating point types carry absolute tolerances; exact types use zero
/// tolerances so every comparison is decided exactly.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync
{
    /// Smallest magnitude accepted as a pivot element.
    fn pivot_tol() -> Self;
    /// Allowed bound violation of a basic variable.
    fn feas_tol() -> Self;
    /// Reduced-cost threshold for optimality.
    fn opt_tol() -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn is_exact() -> bool {
        false
    }
}

impl Scalar for f64 {
    fn pivot_tol() -> Self {
        1e-9
    }
    fn feas_tol() -> Self {
        1e-9
    }
    fn opt_tol() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn pivot_tol() -> Self {
        1e-5
    }
    fn feas_tol() -> Self {
        1e-5
    }
    fn opt_tol() -> Self {
        1e-5
    }
}

impl Scalar for BigRational {
    fn pivot_tol() -> Self {
        Ratio::from_integer(BigInt::from(0))
    }
    fn feas_tol() -> Self {
        Self::pivot_tol()
    }
    fn opt_tol() -> Self {
        Self::pivot_tol()
    }
    fn is_exact() -> bool {
        true
    }
}

impl Scalar for Ratio<i128> {
    fn pivot_tol() -> Self {
        Ratio::from_integer(0)
    }
    fn feas_tol() -> Self {
        Self::pivot_tol()
    }
    fn opt_tol() -> Self {
        Self::pivot_tol()
    }
    fn is_exact() -> bool {
        true
    }
}
