//! Scalar abstraction shared by the PL machinery.

use std::fmt::Debug;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Ordered field used for breakpoints, radii and distances.
///
/// `BigRational` is the exact instance; the float instances exist for quick
/// plotting and for comparing against exact results.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// True when comparisons and arithmetic are exact.
    const EXACT: bool;

    fn to_ratio(&self) -> BigRational;
    fn from_ratio(q: &BigRational) -> Self;

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).unwrap() / Self::from_i64(den).unwrap()
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half() -> Self {
        Self::one() / Self::two()
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn to_ratio(&self) -> BigRational {
        self.clone()
    }

    fn from_ratio(q: &BigRational) -> Self {
        q.clone()
    }

    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn to_ratio(&self) -> BigRational {
                BigRational::from_float(*self).expect("finite float")
            }

            fn from_ratio(q: &BigRational) -> Self {
                q.to_f64().unwrap_or(f64::NAN) as $t
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

pub fn smin<S: Scalar>(a: S, b: S) -> S {
    if b < a {
        b
    } else {
        a
    }
}

pub fn smax<S: Scalar>(a: S, b: S) -> S {
    if b > a {
        b
    } else {
        a
    }
}

/// `2^-j` in the scalar field.
pub fn dyadic<S: Scalar>(j: u32) -> S {
    let mut x = S::one();
    for _ in 0..j {
        x = x / S::two();
    }
    x
}

/// Exact rational `num/den`.
pub fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn q_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Smallest integer `>= x`.
pub fn ceil_int(x: &BigRational) -> BigInt {
    x.ceil().to_integer()
}
