//! The two-map IFS `{λt, λt + 1 - λ}`, its coding map, and greedy codings.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{half, Enclosure};
use crate::scalar::Scalar;
use crate::seqcode::{EpSequence, Word};
use crate::Rational;

/// `f_{λ,d}(t) = λt + d(1 - λ)`.
pub fn apply_branch<S: Scalar>(digit: u8, lambda: &S, t: &S) -> S {
    assert!(digit <= 1, "branch digit must be 0 or 1");
    let scaled = lambda.clone() * t.clone();
    if digit == 0 {
        scaled
    } else {
        scaled + (S::one() - lambda.clone())
    }
}

/// `P_w(λ) = Σ w_n λ^(n-1)` by Horner's rule.
fn digit_poly<S: Scalar>(w: &Word, lambda: &S) -> S {
    w.bits().iter().rev().fold(S::zero(), |acc, &b| {
        let acc = acc * lambda.clone();
        if b == 1 {
            acc + S::one()
        } else {
            acc
        }
    })
}

/// The coding map `π_λ(s) = (1-λ) Σ s_n λ^(n-1)`, in closed form for an
/// eventually periodic `s = u v^inf`:
/// `(1-λ) [P_u(λ) + λ^|u| P_v(λ) / (1 - λ^|v|)]`.
///
/// Exact over rationals, containment-sound over enclosures.
pub fn pi_eval<S: Scalar>(s: &EpSequence, lambda: &S) -> S {
    let u = s.preperiod();
    let v = s.period();
    let one_minus = S::one() - lambda.clone();
    let head = digit_poly(u, lambda);
    if v.bits().iter().all(|&b| b == 0) {
        return one_minus * head;
    }
    let lv = lambda.powi(v.len() as u32);
    let tail = lambda.powi(u.len() as u32) * digit_poly(v, lambda) / (S::one() - lv);
    one_minus * (head + tail)
}

/// Enclosure of `d/dλ π_λ(s)` for `s` starting with `0`.
///
/// Sums `((n-1) - nλ) s_n λ^(n-2)` for `2 <= n <= truncation` and adds the
/// tail `[0, Σ_{n>T} (n-1) λ^(n-2)]`, whose closed form is
/// `λ^(T-1) (T - (T-1)λ) / (1-λ)^2`. Each tail term lies in
/// `[0, (n-1)λ^(n-2)]` because `λ < 1/2`.
pub fn pi_derivative(s: &EpSequence, lambda: &Enclosure, truncation: u32) -> Result<Enclosure> {
    if s.digit(1) != 0 {
        return Err(Error::InvalidInput(format!("{s} must start with 0")));
    }
    if s == &EpSequence::zeros() {
        return Err(Error::InvalidInput("0^inf has zero derivative".into()));
    }
    let half = Enclosure::from_rational(&half(), lambda.bits());
    if !lambda.certainly_lt(&half) || lambda.lo().signum() <= 0 {
        return Err(Error::InvalidInput("λ must lie in (0, 1/2)".into()));
    }
    if truncation < 2 {
        return Err(Error::NeedsLargerTruncation(truncation));
    }
    let bits = lambda.bits();
    let mut sum = Enclosure::zero();
    let mut pow = Enclosure::one(); // λ^(n-2)
    for n in 2..=truncation {
        if s.digit(n as usize) == 1 {
            let coeff = Enclosure::from_int(n as i64 - 1, bits)
                - Enclosure::from_int(n as i64, bits) * lambda.clone();
            sum = sum + coeff * pow.clone();
        }
        pow = pow * lambda.clone();
    }
    let t = truncation as i64;
    let one_minus = Enclosure::one() - lambda.clone();
    let tail_hi = lambda.pow(truncation - 1)
        * (Enclosure::from_int(t, bits) - Enclosure::from_int(t - 1, bits) * lambda.clone())
        / one_minus.pow(2);
    let tail = Enclosure::new(crate::numerics::Dyadic::zero(), tail_hi.hi().clone(), bits);
    let d = sum + tail;
    if !d.is_positive() {
        return Err(Error::NeedsLargerTruncation(truncation));
    }
    Ok(d)
}

/// Result of running the greedy digit algorithm.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum GreedyOutcome {
    /// The remainder cycled; `coding` is the greedy coding.
    Member { coding: EpSequence, steps: usize },
    /// The remainder fell into the central gap at this (1-based) step.
    NotMember { reject_step: usize },
    /// `max_steps` digits without a cycle or a rejection.
    Unresolved { digits_so_far: Word },
}

/// Greedy coding of `x` in base `λ`, the lexicographically largest coding.
///
/// From `y = x`: emit `1` and set `y ← (y - (1-λ))/λ` when `y >= 1-λ`; emit
/// `0` and set `y ← y/λ` when `y <= λ`; reject when `λ < y < 1-λ`. At
/// `λ = 1/2` the tie `y = 1/2` takes digit `1`. Exact arithmetic makes a
/// repeated remainder a proof of an eventually periodic coding.
pub fn greedy_digits(x: &Rational, lambda: &Rational, max_steps: usize) -> Result<GreedyOutcome> {
    if *x < Rational::zero() || *x > Rational::one() {
        return Err(Error::InvalidInput(format!("x = {x} is outside [0, 1]")));
    }
    if *lambda <= Rational::zero() || *lambda > half() {
        return Err(Error::InvalidInput(format!(
            "λ = {lambda} is outside (0, 1/2]"
        )));
    }
    let one_minus = Rational::one() - lambda;
    let mut seen: HashMap<Rational, usize> = HashMap::new();
    let mut digits = Word::empty();
    let mut y = x.clone();
    for step in 0.. {
        if let Some(&start) = seen.get(&y) {
            let coding = EpSequence::new(
                digits.prefix(start),
                Word::new(digits.bits()[start..].to_vec())?,
            )?;
            return Ok(GreedyOutcome::Member {
                coding,
                steps: step,
            });
        }
        if step == max_steps {
            return Ok(GreedyOutcome::Unresolved {
                digits_so_far: digits,
            });
        }
        seen.insert(y.clone(), step);
        if y >= one_minus {
            digits.push(1);
            y = (&y - &one_minus) / lambda;
        } else if y <= *lambda {
            digits.push(0);
            y = &y / lambda;
        } else {
            return Ok(GreedyOutcome::NotMember {
                reject_step: step + 1,
            });
        }
    }
    unreachable!("the loop only exits by returning")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Member,
    NotMember,
    Unknown,
}

/// Whether `x ∈ K_λ`, decided by [`greedy_digits`].
pub fn membership(x: &Rational, lambda: &Rational, max_steps: usize) -> Result<Membership> {
    Ok(match greedy_digits(x, lambda, max_steps)? {
        GreedyOutcome::Member { .. } => Membership::Member,
        GreedyOutcome::NotMember { .. } => Membership::NotMember,
        GreedyOutcome::Unresolved { .. } => Membership::Unknown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ratio;

    fn seq(s: &str) -> EpSequence {
        s.parse().unwrap()
    }

    #[test]
    fn branch_examples() {
        assert_eq!(apply_branch(0, &ratio(1, 3), &ratio(1, 1)), ratio(1, 3));
        assert_eq!(apply_branch(1, &ratio(1, 3), &ratio(0, 1)), ratio(2, 3));
        assert_eq!(apply_branch(1, &ratio(1, 2), &ratio(1, 1)), ratio(1, 1));
        assert!((apply_branch(1, &0.25f64, &0.5) - 0.875).abs() < 1e-15);
    }

    #[test]
    fn pi_examples() {
        assert_eq!(pi_eval(&seq("0(1)"), &ratio(2, 5)), ratio(2, 5));
        assert_eq!(pi_eval(&seq("1(0)"), &ratio(1, 3)), ratio(2, 3));
        assert_eq!(pi_eval(&seq("(01)"), &ratio(1, 2)), ratio(1, 3));
        let e = Enclosure::from_rational(&ratio(1, 3), 96);
        assert!(pi_eval(&seq("(01)"), &e).contains_rational(&ratio(1, 4)));
        assert!((pi_eval(&seq("(01)"), &0.5f64) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn derivative_examples() {
        let l = Enclosure::from_rational(&ratio(1, 4), 128);
        let d = pi_derivative(&seq("0(1)"), &l, 64).unwrap();
        assert!(d.contains_rational(&ratio(1, 1)));
        let d = pi_derivative(&seq("01(0)"), &l, 64).unwrap();
        assert!(d.contains_rational(&ratio(1, 2)));
        let l3 = Enclosure::from_rational(&ratio(3, 10), 128);
        for s in ["0(1)", "0001(0)", "0(01)", "01(0)", "000000001(0)"] {
            assert!(
                pi_derivative(&seq(s), &l3, 64).unwrap().is_positive(),
                "{s}"
            );
        }
        assert_eq!(
            pi_derivative(&seq("00000000001(0)"), &l3, 8),
            Err(Error::NeedsLargerTruncation(8))
        );
        assert!(pi_derivative(&seq("1(0)"), &l3, 64).is_err());
    }

    #[test]
    fn greedy_examples() {
        assert_eq!(
            greedy_digits(&ratio(1, 4), &ratio(1, 2), 64).unwrap(),
            GreedyOutcome::Member {
                coding: seq("01(0)"),
                steps: 3
            }
        );
        match greedy_digits(&ratio(1, 3), &ratio(1, 3), 64).unwrap() {
            GreedyOutcome::Member { coding, .. } => assert_eq!(coding, seq("0(1)")),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            greedy_digits(&ratio(1, 3), &ratio(2, 5), 64).unwrap(),
            GreedyOutcome::NotMember { reject_step: 3 }
        );
        match greedy_digits(&ratio(1, 3), &ratio(2, 7), 5).unwrap() {
            GreedyOutcome::Unresolved { digits_so_far } => assert_eq!(digits_so_far.len(), 5),
            GreedyOutcome::NotMember { .. } => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn membership_examples() {
        assert_eq!(
            membership(&ratio(1, 3), &ratio(1, 2), 64).unwrap(),
            Membership::Member
        );
        assert_eq!(
            membership(&ratio(1, 3), &ratio(1, 4), 64).unwrap(),
            Membership::NotMember
        );
        assert_eq!(
            membership(&ratio(1, 4), &ratio(1, 4), 64).unwrap(),
            Membership::Member
        );
        assert!(membership(&ratio(1, 3), &ratio(3, 5), 64).is_err());
    }
}
