use std::cmp::Ordering;

use lambdaset::ifs::{greedy_digits, pi_derivative, pi_eval, GreedyOutcome};
use lambdaset::numerics::{half, ratio};
use lambdaset::seqcode::lex_compare;
use lambdaset::{Dyadic, Enclosure, EpSequence, Rational, Word};
use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;

/// Rational λ in (0, 1/2).
fn lambda() -> impl Strategy<Value = Rational> {
    (1i64..500, 2i64..=1000).prop_filter_map("λ < 1/2", |(p, q)| {
        let l = ratio(p, q);
        (l < half()).then_some(l)
    })
}

fn finite_tail_seq() -> impl Strategy<Value = EpSequence> {
    (prop::collection::vec(0u8..2, 0..=20), 0u8..2)
        .prop_map(|(w, t)| Word::new(w).unwrap().then_periodic(&Word::repeat(t, 1)))
}

/// Every coding of `x` at λ = 1/2 of the form `w 0^inf` or `w 1^inf` with
/// `|w| <= depth`, by depth-first search with interval pruning.
fn all_codings(x: &Rational, depth: usize) -> Vec<EpSequence> {
    fn go(x: &Rational, w: &Word, depth: usize, out: &mut Vec<EpSequence>) {
        let (lo, hi) = (
            pi_eval(&w.then_zeros(), &half()),
            pi_eval(&w.then_ones(), &half()),
        );
        if *x < lo || *x > hi {
            return;
        }
        if *x == lo {
            out.push(w.then_zeros());
        }
        if *x == hi {
            out.push(w.then_ones());
        }
        if w.len() < depth {
            go(x, &w.with(0), depth, out);
            go(x, &w.with(1), depth, out);
        }
    }
    let mut out = Vec::new();
    go(x, &Word::empty(), depth, &mut out);
    out.sort();
    out.dedup();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn greedy_round_trip(a in 0i64..=60, b in 1i64..=60, l in lambda()) {
        prop_assume!(a <= b);
        let x = ratio(a, b);
        if let GreedyOutcome::Member { coding, .. } = greedy_digits(&x, &l, 2000).unwrap() {
            prop_assert_eq!(pi_eval(&coding, &l), x);
        }
    }

    #[test]
    fn derivative_encloses_central_difference(s in finite_tail_seq(), l in lambda()) {
        let s = s.prepend(&Word::repeat(0, 1));
        prop_assume!(s != EpSequence::zeros());
        prop_assume!(l > ratio(1, 50) && l < ratio(49, 100));
        let h = Rational::new(BigInt::one(), BigInt::one() << 30);
        let diff = (pi_eval(&s, &(&l + &h)) - pi_eval(&s, &(&l - &h))) / (&h * ratio(2, 1));
        let d = pi_derivative(&s, &Enclosure::from_rational(&l, 128), 200).unwrap();
        let slack = Dyadic::pow2(-20);
        prop_assert!(d.lo().sub(&slack).to_rational() <= diff && diff <= d.hi().add(&slack).to_rational());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn coding_map_is_increasing(s in finite_tail_seq(), t in finite_tail_seq(), l in lambda()) {
        let (s, t) = match lex_compare(&s, &t) {
            Ordering::Less => (s, t),
            Ordering::Greater => (t, s),
            Ordering::Equal => return Ok(()),
        };
        prop_assert!(pi_eval(&s, &l) < pi_eval(&t, &l));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn greedy_is_maximal_for_dyadics(k in 1u32..8, a in 0u64..256) {
        let den = 1u64 << k;
        prop_assume!(a <= den);
        let x = Rational::new(BigInt::from(a), BigInt::from(den));
        let GreedyOutcome::Member { coding, .. } = greedy_digits(&x, &half(), 64).unwrap() else {
            panic!("dyadics are members at 1/2");
        };
        let all = all_codings(&x, 20);
        prop_assert!(!all.is_empty());
        prop_assert!(all.iter().all(|c| lex_compare(&coding, c) != Ordering::Less));
        if x < Rational::one() {
            prop_assert!(!coding.ends_in_ones());
        }
    }
}
