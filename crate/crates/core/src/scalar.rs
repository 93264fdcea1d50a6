//! The scalar abstraction shared by every numeric routine in the crate.
//!
//! The coding map, the IFS branches and the thickness computations are
//! written once against [`Scalar`] and run over exact rationals, certified
//! enclosures, or plain floats.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, ToPrimitive, Zero};

use crate::Rational;

pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A constant of the same kind (and precision) as `like`.
    fn from_rational_like(r: &Rational, like: &Self) -> Self;

    /// Certainly `self < other` for every value represented.
    fn certainly_lt(&self, other: &Self) -> bool;

    /// Certainly `self <= other` for every value represented.
    fn certainly_le(&self, other: &Self) -> bool;

    /// Pointwise minimum.
    fn min_of(&self, other: &Self) -> Self;

    /// Pointwise maximum.
    fn max_of(&self, other: &Self) -> Self;

    /// A value no larger than anything represented, as `f64` (approximate).
    fn lower_f64(&self) -> f64;

    fn upper_f64(&self) -> f64;

    /// A total order that agrees with `<` on certainly separated values.
    fn cmp_center(&self, other: &Self) -> Ordering;

    fn powi(&self, exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_rational_like(r: &Rational, _like: &Self) -> Self {
                r.to_f64().unwrap_or(f64::NAN) as $t
            }

            fn certainly_lt(&self, other: &Self) -> bool {
                self < other
            }

            fn certainly_le(&self, other: &Self) -> bool {
                self <= other
            }

            fn min_of(&self, other: &Self) -> Self {
                <$t>::min(*self, *other)
            }

            fn max_of(&self, other: &Self) -> Self {
                <$t>::max(*self, *other)
            }

            fn lower_f64(&self) -> f64 {
                *self as f64
            }

            fn upper_f64(&self) -> f64 {
                *self as f64
            }

            fn cmp_center(&self, other: &Self) -> Ordering {
                self.total_cmp(other)
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for Rational {
    fn from_rational_like(r: &Rational, _like: &Self) -> Self {
        r.clone()
    }

    fn certainly_lt(&self, other: &Self) -> bool {
        self < other
    }

    fn certainly_le(&self, other: &Self) -> bool {
        self <= other
    }

    fn min_of(&self, other: &Self) -> Self {
        std::cmp::min(self, other).clone()
    }

    fn max_of(&self, other: &Self) -> Self {
        std::cmp::max(self, other).clone()
    }

    fn lower_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn upper_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn cmp_center(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_matches_repeated_products() {
        let r = Rational::new(2.into(), 5.into());
        assert_eq!(r.powi(0), Rational::one());
        assert_eq!(r.powi(3), Rational::new(8.into(), 125.into()));
        assert!((0.5f64.powi(10) - Scalar::powi(&0.5f64, 10)).abs() < 1e-15);
        assert_eq!(Scalar::powi(&2f32, 5), 32.0);
    }
}
