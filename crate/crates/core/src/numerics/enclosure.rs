use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::dyadic::{Dyadic, Round};
use crate::scalar::Scalar;
use crate::Rational;

/// Working precision never drops below this many significant bits.
pub const MIN_BITS: u32 = 32;

/// A closed interval `[lo, hi]` with dyadic endpoints, certified to contain
/// the exact value it stands for. Every operation rounds `lo` down and `hi`
/// up to `bits` significant bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    lo: Dyadic,
    hi: Dyadic,
    bits: u32,
}

impl Enclosure {
    pub fn new(lo: Dyadic, hi: Dyadic, bits: u32) -> Self {
        assert!(lo <= hi, "enclosure endpoints out of order: {lo} > {hi}");
        Enclosure { lo, hi, bits }
    }

    /// A degenerate enclosure of an exact dyadic.
    pub fn point(d: Dyadic, bits: u32) -> Self {
        Enclosure {
            lo: d.clone(),
            hi: d,
            bits,
        }
    }

    pub fn from_rational(r: &Rational, bits: u32) -> Self {
        match Dyadic::exact_from_rational(r) {
            Some(d) if d.sig_bits() <= bits as u64 => Enclosure::point(d, bits),
            _ => Enclosure {
                lo: Dyadic::from_rational(r, bits, Round::Down),
                hi: Dyadic::from_rational(r, bits, Round::Up),
                bits,
            },
        }
    }

    pub fn from_int(n: i64, bits: u32) -> Self {
        Enclosure::point(Dyadic::from_int(n), bits)
    }

    /// Hull of two enclosures.
    pub fn hull(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: std::cmp::min(&self.lo, &other.lo).clone(),
            hi: std::cmp::max(&self.hi, &other.hi).clone(),
            bits: self.bits.max(other.bits),
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn with_bits(mut self, bits: u32) -> Self {
        self.bits = bits;
        self
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn midpoint(&self) -> Dyadic {
        self.lo.add(&self.hi).half()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains_rational(&self, r: &Rational) -> bool {
        self.lo.to_rational() <= *r && *r <= self.hi.to_rational()
    }

    pub fn contains_dyadic(&self, d: &Dyadic) -> bool {
        &self.lo <= d && d <= &self.hi
    }

    pub fn contains(&self, other: &Enclosure) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersection(&self, other: &Enclosure) -> Option<Enclosure> {
        if !self.intersects(other) {
            return None;
        }
        Some(Enclosure {
            lo: std::cmp::max(&self.lo, &other.lo).clone(),
            hi: std::cmp::min(&self.hi, &other.hi).clone(),
            bits: self.bits.max(other.bits),
        })
    }

    /// Strictly above zero.
    pub fn is_positive(&self) -> bool {
        self.lo.signum() > 0
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    fn prec(&self, other: &Enclosure) -> u32 {
        self.bits.max(other.bits).max(MIN_BITS)
    }

    /// Containment-preserving power with outward rounding.
    pub fn pow(&self, exp: u32) -> Enclosure {
        if exp == 0 {
            return Enclosure::point(Dyadic::one(), self.bits);
        }
        let bits = self.bits.max(MIN_BITS);
        if self.lo.signum() >= 0 {
            // Monotone on the nonnegative half-line: power each end separately.
            Enclosure {
                lo: pow_directed(&self.lo, exp, bits, Round::Down),
                hi: pow_directed(&self.hi, exp, bits, Round::Up),
                bits: self.bits,
            }
        } else {
            Scalar::powi(self, exp)
        }
    }

    /// Square root of an enclosure with a nonnegative lower end.
    pub fn sqrt(&self) -> Enclosure {
        assert!(
            self.lo.signum() >= 0,
            "square root of a possibly negative enclosure"
        );
        let bits = self.bits.max(MIN_BITS);
        Enclosure {
            lo: self.lo.sqrt(bits, Round::Down),
            hi: self.hi.sqrt(bits, Round::Up),
            bits: self.bits,
        }
    }

    pub fn checked_div(&self, other: &Enclosure) -> Option<Enclosure> {
        if other.contains_zero() {
            return None;
        }
        let p = self.prec(other);
        let cands = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let lo = cands
            .iter()
            .map(|(a, b)| a.div(b, p, Round::Down))
            .min()
            .expect("four candidates");
        let hi = cands
            .iter()
            .map(|(a, b)| a.div(b, p, Round::Up))
            .max()
            .expect("four candidates");
        Some(Enclosure {
            lo,
            hi,
            bits: self.bits.max(other.bits),
        })
    }

    /// Approximate centre, for display.
    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }
}

fn pow_directed(base: &Dyadic, exp: u32, bits: u32, dir: Round) -> Dyadic {
    let mut acc = Dyadic::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&b).round(bits, dir);
        }
        e >>= 1;
        if e > 0 {
            b = b.mul(&b).round(bits, dir);
        }
    }
    acc
}

impl Add for Enclosure {
    type Output = Enclosure;

    fn add(self, other: Enclosure) -> Enclosure {
        let p = self.prec(&other);
        Enclosure {
            lo: self.lo.add(&other.lo).round(p, Round::Down),
            hi: self.hi.add(&other.hi).round(p, Round::Up),
            bits: self.bits.max(other.bits),
        }
    }
}

impl Sub for Enclosure {
    type Output = Enclosure;

    fn sub(self, other: Enclosure) -> Enclosure {
        let p = self.prec(&other);
        Enclosure {
            lo: self.lo.sub(&other.hi).round(p, Round::Down),
            hi: self.hi.sub(&other.lo).round(p, Round::Up),
            bits: self.bits.max(other.bits),
        }
    }
}

impl Mul for Enclosure {
    type Output = Enclosure;

    fn mul(self, other: Enclosure) -> Enclosure {
        let p = self.prec(&other);
        let (lo, hi) = if self.lo.signum() >= 0 && other.lo.signum() >= 0 {
            (self.lo.mul(&other.lo), self.hi.mul(&other.hi))
        } else {
            let prods = [
                self.lo.mul(&other.lo),
                self.lo.mul(&other.hi),
                self.hi.mul(&other.lo),
                self.hi.mul(&other.hi),
            ];
            let lo = prods.iter().min().expect("four products").clone();
            let hi = prods.iter().max().expect("four products").clone();
            (lo, hi)
        };
        Enclosure {
            lo: lo.round(p, Round::Down),
            hi: hi.round(p, Round::Up),
            bits: self.bits.max(other.bits),
        }
    }
}

impl Div for Enclosure {
    type Output = Enclosure;

    /// # Panics
    /// If the divisor contains zero; use [`Enclosure::checked_div`] otherwise.
    fn div(self, other: Enclosure) -> Enclosure {
        self.checked_div(&other)
            .expect("division by an enclosure that contains zero")
    }
}

impl Neg for Enclosure {
    type Output = Enclosure;

    fn neg(self) -> Enclosure {
        Enclosure {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
            bits: self.bits,
        }
    }
}

impl Zero for Enclosure {
    fn zero() -> Self {
        Enclosure::point(Dyadic::zero(), 0)
    }

    fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }
}

impl One for Enclosure {
    fn one() -> Self {
        Enclosure::point(Dyadic::one(), 0)
    }
}

impl Scalar for Enclosure {
    fn from_rational_like(r: &Rational, like: &Self) -> Self {
        Enclosure::from_rational(r, like.bits.max(MIN_BITS))
    }

    fn certainly_lt(&self, other: &Self) -> bool {
        self.hi < other.lo
    }

    fn certainly_le(&self, other: &Self) -> bool {
        self.hi <= other.lo
    }

    fn min_of(&self, other: &Self) -> Self {
        Enclosure {
            lo: std::cmp::min(&self.lo, &other.lo).clone(),
            hi: std::cmp::min(&self.hi, &other.hi).clone(),
            bits: self.bits.max(other.bits),
        }
    }

    fn max_of(&self, other: &Self) -> Self {
        Enclosure {
            lo: std::cmp::max(&self.lo, &other.lo).clone(),
            hi: std::cmp::max(&self.hi, &other.hi).clone(),
            bits: self.bits.max(other.bits),
        }
    }

    fn lower_f64(&self) -> f64 {
        self.lo.to_f64()
    }

    fn upper_f64(&self) -> f64 {
        self.hi.to_f64()
    }

    fn cmp_center(&self, other: &Self) -> std::cmp::Ordering {
        self.lo.add(&self.hi).cmp(&other.lo.add(&other.hi))
    }

    fn powi(&self, exp: u32) -> Self {
        if self.lo.signum() >= 0 {
            return self.pow(exp);
        }
        let mut acc = Enclosure::point(Dyadic::one(), self.bits);
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// JSON form: `{"lo": "<decimal>", "hi": "<decimal>", "bits": p}` with exact
/// decimal strings.
#[derive(Serialize, Deserialize)]
struct EnclosureRepr {
    lo: String,
    hi: String,
    bits: u32,
}

impl Serialize for Enclosure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        EnclosureRepr {
            lo: self.lo.to_decimal_string(),
            hi: self.hi.to_decimal_string(),
            bits: self.bits,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Enclosure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = EnclosureRepr::deserialize(d)?;
        let parse = |s: &str| -> Result<Dyadic, D::Error> {
            let q = super::parse_rational(s).map_err(D::Error::custom)?;
            Dyadic::exact_from_rational(&q)
                .ok_or_else(|| D::Error::custom(format!("{s} is not a dyadic rational")))
        };
        let (lo, hi) = (parse(&r.lo)?, parse(&r.hi)?);
        if lo > hi {
            return Err(D::Error::custom("enclosure endpoints out of order"));
        }
        Ok(Enclosure {
            lo,
            hi,
            bits: r.bits,
        })
    }
}
