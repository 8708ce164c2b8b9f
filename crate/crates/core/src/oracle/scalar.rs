//! Number types the closed forms are evaluated in: `f64` for speed and
//! `BigRational` when results must be exact.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

pub trait Scalar: Clone + PartialOrd + Debug + Num + Neg<Output = Self> + Send + Sync {
    /// Exact conversion for rationals. Inputs must be finite.
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn floor_int(&self) -> i64;
    fn from_int(v: i64) -> Self;
    /// Equality up to the type's rounding slack.
    fn is_tie(&self, other: &Self) -> bool;

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn sq(&self) -> Self {
        self.clone() * self.clone()
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn floor_int(&self) -> i64 {
        self.floor() as i64
    }

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn is_tie(&self, other: &Self) -> bool {
        (self - other).abs() <= 1e-12 * self.abs().max(other.abs()).max(1e-300)
    }
}

impl Scalar for BigRational {
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite value")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn floor_int(&self) -> i64 {
        self.floor()
            .to_integer()
            .to_i64()
            .expect("floor fits in i64")
    }

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn is_tie(&self, other: &Self) -> bool {
        self == other
    }
}

/// `2^e` as an integer-valued scalar.
pub(crate) fn pow2<S: Scalar>(e: u32) -> S {
    S::from_int(1i64 << e)
}

pub(crate) fn is_power_of_two(r: i64) -> bool {
    r > 0 && (r & (r - 1)) == 0
}
