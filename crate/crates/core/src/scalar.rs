//! Scalar abstraction shared by the dynamics and the LP kernel.
//!
//! Everything in this crate that does arithmetic is written against [`Scalar`].
//! Threshold computation and cycle detection additionally need exact equality
//! and hashing, which is what [`ExactScalar`] adds.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Ordered field element usable for message evolution and LP pivoting.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    /// `num / den`. Panics on a zero denominator.
    fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i64(num).expect("integer is representable")
            / Self::from_i64(den).expect("integer is representable")
    }

    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer is representable")
    }

    /// Symmetric saturation to `[-1, 1]`.
    fn sat(self) -> Self {
        let one = Self::one();
        if self > one {
            one
        } else if self < -one.clone() {
            -one
        } else {
            self
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn to_f64_lossy(&self) -> f64;
}

/// A scalar with exact equality, a total order and hashing.
pub trait ExactScalar: Scalar + Eq + Ord + Hash {
    fn to_big(&self) -> BigRational;

    /// Converts from an arbitrary-precision rational, `None` if it does not fit.
    fn from_big(v: &BigRational) -> Option<Self>;
}

impl Scalar for f32 {
    fn to_f64_lossy(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for f64 {
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for Ratio<i64> {
    fn to_f64_lossy(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

impl ExactScalar for BigRational {
    fn to_big(&self) -> BigRational {
        self.clone()
    }

    fn from_big(v: &BigRational) -> Option<Self> {
        Some(v.clone())
    }
}

impl ExactScalar for Ratio<i64> {
    fn to_big(&self) -> BigRational {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }

    fn from_big(v: &BigRational) -> Option<Self> {
        Some(Ratio::new(v.numer().to_i64()?, v.denom().to_i64()?))
    }
}

/// Converts between two exact scalar types; `None` when the value overflows the target.
pub fn convert<S: ExactScalar, T: ExactScalar>(v: &S) -> Option<T> {
    T::from_big(&v.to_big())
}

/// `true` iff every entry equals one.
pub fn all_ones<T: Scalar>(v: &[T]) -> bool {
    v.iter().all(One::is_one)
}

/// `true` iff every entry is zero.
pub fn all_zero<T: Scalar>(v: &[T]) -> bool {
    v.iter().all(Zero::is_zero)
}
