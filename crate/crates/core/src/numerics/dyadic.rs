//! Dyadic rationals `m · 2^e` with directed rounding to a number of
//! significant bits.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

/// An exact dyadic rational. Normalized: the mantissa is odd, or zero with
/// exponent zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

fn floor_shr(m: &BigInt, s: u64) -> BigInt {
    // num-bigint shifts negative values toward -inf, i.e. floor.
    m >> s
}

fn ceil_shr(m: &BigInt, s: u64) -> BigInt {
    -((-m) >> s)
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            mant: BigInt::one(),
            exp: 0,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic::new(BigInt::from(n), 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic {
            mant: BigInt::one(),
            exp: e,
        }
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        if let Some(tz) = self.mant.trailing_zeros() {
            if tz > 0 {
                self.mant >>= tz;
                self.exp += tz as i64;
            }
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Number of significant bits of the mantissa.
    pub fn sig_bits(&self) -> u64 {
        self.mant.bits()
    }

    /// Rounds to at most `bits` significant bits in the given direction.
    pub fn round(&self, bits: u32, dir: Round) -> Dyadic {
        let nb = self.mant.bits();
        if nb <= bits as u64 {
            return self.clone();
        }
        let s = nb - bits as u64;
        let m = match dir {
            Round::Down => floor_shr(&self.mant, s),
            Round::Up => ceil_shr(&self.mant, s),
        };
        Dyadic::new(m, self.exp + s as i64)
    }

    /// Rounds to a multiple of `2^e` in the given direction.
    pub fn round_to_exp(&self, e: i64, dir: Round) -> Dyadic {
        if self.exp >= e {
            return self.clone();
        }
        let s = (e - self.exp) as u64;
        let m = match dir {
            Round::Down => floor_shr(&self.mant, s),
            Round::Up => ceil_shr(&self.mant, s),
        };
        Dyadic::new(m, e)
    }

    /// Square root of a nonnegative value, rounded to about `bits`
    /// significant bits in the given direction.
    pub fn sqrt(&self, bits: u32, dir: Round) -> Dyadic {
        assert!(self.signum() >= 0, "square root of a negative dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        // m 2^e = (m 2^(2p+r)) 2^(e-2p-r) with e - 2p - r even.
        let extra = 2 * bits as i64 + 2 - self.mant.bits() as i64;
        let mut shift = extra.max(0);
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let scaled = &self.mant << (shift as u64);
        let mut root = num_integer::Roots::sqrt(&scaled);
        if dir == Round::Up && &root * &root != scaled {
            root += 1;
        }
        Dyadic::new(root, (self.exp - shift) / 2)
    }

    /// Floor of `self · 2^k` as an integer.
    pub fn floor_scaled(&self, k: i64) -> BigInt {
        let e = self.exp + k;
        if e >= 0 {
            &self.mant << (e as u64)
        } else {
            floor_shr(&self.mant, (-e) as u64)
        }
    }

    fn aligned(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, i64) {
        let e = a.exp.min(b.exp);
        (
            &a.mant << ((a.exp - e) as u64),
            &b.mant << ((b.exp - e) as u64),
            e,
        )
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b, e) = Dyadic::aligned(self, other);
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    /// `self / 2`, exact.
    pub fn half(&self) -> Dyadic {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp - 1,
        }
    }

    /// Directed-rounded quotient with `bits` significant bits.
    pub fn div(&self, other: &Dyadic, bits: u32, dir: Round) -> Dyadic {
        assert!(!other.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        // Scale the numerator so the integer quotient carries bits + 2 bits.
        let k = (bits as i64 + 2 + other.mant.bits() as i64 - self.mant.bits() as i64).max(0);
        let num = &self.mant << (k as u64);
        let (q, r) = num.div_mod_floor(&other.mant);
        let q = match dir {
            Round::Down => q,
            Round::Up if r.is_zero() => q,
            Round::Up => q + 1,
        };
        Dyadic::new(q, self.exp - other.exp - k).round(bits, dir)
    }

    /// Directed rounding of a rational.
    pub fn from_rational(r: &Rational, bits: u32, dir: Round) -> Dyadic {
        Dyadic::new(r.numer().clone(), 0).div(&Dyadic::new(r.denom().clone(), 0), bits, dir)
    }

    /// `Some` when the rational is itself dyadic.
    pub fn exact_from_rational(r: &Rational) -> Option<Dyadic> {
        let d = r.denom();
        let tz = d.trailing_zeros().unwrap_or(0);
        if (d >> tz).is_one() {
            Some(Dyadic::new(r.numer().clone(), -(tz as i64)))
        } else {
            None
        }
    }

    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mant << (self.exp as u64))
        } else {
            Rational::new(self.mant.clone(), BigInt::one() << ((-self.exp) as u64))
        }
    }

    pub fn to_f64(&self) -> f64 {
        // Keep 64 leading bits, then scale.
        let nb = self.mant.bits() as i64;
        let shift = (nb - 64).max(0);
        let m = floor_shr(&self.mant, shift as u64)
            .to_f64()
            .unwrap_or(f64::NAN);
        let e = self.exp + shift;
        m * 2f64.powi(e.clamp(-1100, 1100) as i32)
    }

    /// Exact decimal expansion (dyadics always terminate in base 10).
    pub fn to_decimal_string(&self) -> String {
        if self.exp >= 0 {
            return (&self.mant << (self.exp as u64)).to_string();
        }
        let k = (-self.exp) as u32;
        // m / 2^k = m · 5^k / 10^k
        let scaled = self.mant.abs() * num_traits::pow(BigInt::from(5), k as usize);
        let mut digits = scaled.to_string();
        if digits.len() <= k as usize {
            digits = "0".repeat(k as usize - digits.len() + 1) + &digits;
        }
        let split = digits.len() - k as usize;
        let (int, frac) = digits.split_at(split);
        let frac = frac.trim_end_matches('0');
        let sign = if self.mant.is_negative() { "-" } else { "" };
        if frac.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        let (a, b, _) = Dyadic::aligned(self, other);
        a.cmp(&b)
    }
}

impl PartialEq<Rational> for Dyadic {
    fn eq(&self, other: &Rational) -> bool {
        self.to_rational() == *other
    }
}

impl PartialOrd<Rational> for Dyadic {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        self.to_rational().partial_cmp(other)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

/// Serialized as an exact decimal string.
impl serde::Serialize for Dyadic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_decimal_string())
    }
}

impl<'de> serde::Deserialize<'de> for Dyadic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let text = String::deserialize(d)?;
        let r = crate::numerics::parse_rational(&text).map_err(D::Error::custom)?;
        Dyadic::exact_from_rational(&r).ok_or_else(|| D::Error::custom("not a dyadic rational"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn directed_rounding_brackets_rationals() {
        for (n, d) in [(1, 3), (-1, 3), (2, 7), (-5, 11), (1, 10), (22, 7)] {
            let r = rat(n, d);
            let lo = Dyadic::from_rational(&r, 40, Round::Down);
            let hi = Dyadic::from_rational(&r, 40, Round::Up);
            assert!(lo.to_rational() < r && r < hi.to_rational(), "{n}/{d}");
            assert!(hi.sub(&lo).to_rational() <= r.clone().abs() * rat(1, 1 << 38));
        }
        let q = rat(3, 8);
        assert_eq!(Dyadic::from_rational(&q, 40, Round::Down).to_rational(), q);
        assert_eq!(Dyadic::from_rational(&q, 40, Round::Up).to_rational(), q);
    }

    #[test]
    fn decimal_strings_are_exact() {
        assert_eq!(Dyadic::pow2(-3).to_decimal_string(), "0.125");
        assert_eq!(Dyadic::new((-3).into(), -1).to_decimal_string(), "-1.5");
        assert_eq!(Dyadic::from_int(12).to_decimal_string(), "12");
        assert_eq!(Dyadic::zero().to_decimal_string(), "0");
    }

    #[test]
    fn ordering_and_rounding() {
        let a = Dyadic::new(5.into(), -2);
        let b = Dyadic::new(3.into(), -1);
        assert!(a < b);
        assert!(a.neg() > b.neg());
        let x = Dyadic::new(0b1011_0111.into(), 0);
        assert_eq!(x.round(4, Round::Down).to_rational(), rat(0b1011_0000, 1));
        assert_eq!(x.round(4, Round::Up).to_rational(), rat(0b1100_0000, 1));
        assert_eq!(
            x.neg().round(4, Round::Down).to_rational(),
            rat(-0b1100_0000, 1)
        );
    }
}
