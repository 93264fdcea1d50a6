//! Exact rationals, certified enclosures and monotone bisection.

mod dyadic;
mod enclosure;

pub use dyadic::{Dyadic, Round};
pub use enclosure::{Enclosure, MIN_BITS};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Rational;

/// Precision settings for certified computations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionConfig {
    pub precision_bits: u32,
    pub max_bisection_steps: u32,
    /// Bisection stops once the bracket is at most `2^-target_width_log2` wide.
    pub target_width_log2: u32,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig {
            precision_bits: 128,
            max_bisection_steps: 4096,
            target_width_log2: 80,
        }
    }
}

impl PrecisionConfig {
    pub fn new(precision_bits: u32, target_width_log2: u32) -> Result<Self> {
        let cfg = PrecisionConfig {
            precision_bits,
            target_width_log2,
            ..Default::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Same target width, different working precision.
    pub fn with_bits(&self, precision_bits: u32) -> Self {
        PrecisionConfig {
            precision_bits,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.precision_bits < MIN_BITS {
            return Err(Error::InvalidInput(format!(
                "precision_bits must be at least {MIN_BITS}"
            )));
        }
        if self.max_bisection_steps == 0 {
            return Err(Error::InvalidInput(
                "max_bisection_steps must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn target_width(&self) -> Dyadic {
        Dyadic::pow2(-(self.target_width_log2 as i64))
    }

    pub fn enclose(&self, r: &Rational) -> Enclosure {
        Enclosure::from_rational(r, self.precision_bits)
    }
}

/// Parses `p/q`, an integer, or a decimal such as `0.45` / `-1.2e-3`, exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let err = |reason: &str| Error::Parse {
        input: s.to_string(),
        reason: reason.to_string(),
    };
    if t.is_empty() {
        return Err(err("empty number"));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err("bad numerator"))?;
        let d: BigInt = d.trim().parse().map_err(|_| err("bad denominator"))?;
        if d.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (
            &t[..i],
            t[i + 1..].parse::<i32>().map_err(|_| err("bad exponent"))?,
        ),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(err("no digits"));
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err("not a number"));
    }
    let digits: BigInt = format!("{int}{frac}")
        .parse()
        .map_err(|_| err("not a number"))?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        Rational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Root of `f(λ) = target` for a strictly increasing `f`, by bisection.
///
/// `f` maps a point enclosure to an enclosure of its value. Each step keeps
/// the half whose image certainly brackets `target`; if the image at a
/// midpoint straddles `target`, the result is [`Error::Inconclusive`]. An
/// endpoint whose image encloses `target` (for instance a root sitting
/// exactly on the bracket end) is kept as a candidate end of the result.
///
/// A decreasing function is handled by passing its negation with `-target`.
pub fn bisect_monotone<F>(
    f: F,
    bracket: &Enclosure,
    target: &Rational,
    cfg: &PrecisionConfig,
) -> Result<Enclosure>
where
    F: Fn(&Enclosure) -> Enclosure,
{
    cfg.validate()?;
    let bits = cfg.precision_bits;
    let target_width = cfg.target_width();
    let at = |d: &Dyadic| f(&Enclosure::point(d.clone(), bits));

    let side = |img: &Enclosure| -> Side {
        let lo = img.lo().to_rational();
        let hi = img.hi().to_rational();
        if hi < *target {
            Side::Below
        } else if lo > *target {
            Side::Above
        } else if img.is_point() {
            Side::Exact
        } else {
            Side::Straddles
        }
    };

    let mut lo = bracket.lo().clone();
    let mut hi = bracket.hi().clone();
    let lo_side = side(&at(&lo));
    let hi_side = side(&at(&hi));
    match (lo_side, hi_side) {
        (Side::Exact, _) => return Ok(Enclosure::point(lo, bits)),
        (_, Side::Exact) => return Ok(Enclosure::point(hi, bits)),
        (Side::Above, _) | (_, Side::Below) => return Err(Error::NoSignChange),
        (Side::Straddles, Side::Straddles) => return Err(Error::Inconclusive { bits }),
        _ => {}
    }

    let mut steps = 0u32;
    while hi.sub(&lo) > target_width {
        if steps >= cfg.max_bisection_steps {
            return Err(Error::StepLimit(cfg.max_bisection_steps));
        }
        steps += 1;
        let mid = lo.add(&hi).half();
        match side(&at(&mid)) {
            Side::Below => lo = mid,
            Side::Above => hi = mid,
            Side::Exact => return Ok(Enclosure::point(mid, bits)),
            Side::Straddles => return Err(Error::Inconclusive { bits }),
        }
    }
    Ok(Enclosure::new(lo, hi, bits))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Below,
    Above,
    Exact,
    Straddles,
}

/// `n/d` as a rational.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// `1/2`.
pub fn half() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2))
}

/// Serde adaptor writing rationals as `"p/q"` strings.
pub mod rational_str {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use crate::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(de)?;
        super::parse_rational(&s).map_err(D::Error::custom)
    }

    /// The same for a list.
    pub mod vec {
        use serde::ser::SerializeSeq;
        use serde::Serializer;

        use crate::Rational;

        pub fn serialize<S: Serializer>(rs: &[Rational], ser: S) -> Result<S::Ok, S::Error> {
            let mut seq = ser.serialize_seq(Some(rs.len()))?;
            for r in rs {
                seq.serialize_element(&r.to_string())?;
            }
            seq.end()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    fn unit_bracket() -> Enclosure {
        Enclosure::new(Dyadic::zero(), Dyadic::pow2(-1), 128)
    }

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!(parse_rational("1/3").unwrap(), ratio(1, 3));
        assert_eq!(parse_rational(" 2/4 ").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("0.45").unwrap(), ratio(9, 20));
        assert_eq!(parse_rational("-1.25").unwrap(), ratio(-5, 4));
        assert_eq!(parse_rational("3e-2").unwrap(), ratio(3, 100));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("7").unwrap(), ratio(7, 1));
        for bad in ["", "1/0", "abc", "0.4.5", "1/x", "."] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn bisect_identity() {
        let target = ratio(1, 3);
        let r = bisect_monotone(|l| l.clone(), &unit_bracket(), &target, &cfg()).unwrap();
        assert!(r.contains_rational(&target));
        assert!(r.width() <= cfg().target_width());
    }

    #[test]
    fn bisect_cubic() {
        // λ - λ³ = 1/4; hand bisection puts the root in (0.26, 0.27).
        let target = ratio(1, 4);
        let f = |l: &Enclosure| l.clone() - l.pow(3);
        let r = bisect_monotone(f, &unit_bracket(), &target, &cfg()).unwrap();
        assert!(r.lo().to_rational() > ratio(26, 100) && r.hi().to_rational() < ratio(27, 100));
        assert!(r.width() <= cfg().target_width());
        // Exact check across the returned enclosure.
        let g = |x: Rational| &x - &x * &x * &x;
        assert!(g(r.lo().to_rational()) <= target && g(r.hi().to_rational()) >= target);
        assert!((r.to_f64() - 0.269_594).abs() < 1e-5);
    }

    #[test]
    fn bisect_root_at_bracket_end() {
        let target = ratio(1, 3);
        let f = |l: &Enclosure| l.clone() / (Enclosure::one() + l.clone());
        let r = bisect_monotone(f, &unit_bracket(), &target, &cfg()).unwrap();
        assert!(r.contains_rational(&ratio(1, 2)));
        assert!(r.width() <= cfg().target_width());
    }

    #[test]
    fn bisect_errors() {
        let target = ratio(3, 4);
        assert_eq!(
            bisect_monotone(|l| l.clone(), &unit_bracket(), &target, &cfg()),
            Err(Error::NoSignChange)
        );
        let tight = PrecisionConfig {
            max_bisection_steps: 10,
            ..cfg()
        };
        assert_eq!(
            bisect_monotone(|l| l.clone(), &unit_bracket(), &ratio(1, 3), &tight),
            Err(Error::StepLimit(10))
        );
        // An evaluator that can never resolve the target.
        let blurry = |l: &Enclosure| {
            l.clone() + Enclosure::new(Dyadic::pow2(-4).neg(), Dyadic::pow2(-4), 128)
        };
        assert_eq!(
            bisect_monotone(blurry, &unit_bracket(), &ratio(1, 4), &cfg()),
            Err(Error::Inconclusive { bits: 128 })
        );
    }
}
