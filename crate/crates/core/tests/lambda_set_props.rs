use std::cmp::Ordering;

use lambdaset::ifs::{membership, Membership};
use lambdaset::lambda_set::{cover, cover_gaps, forced_word_count, subshift_dim, Target};
use lambdaset::numerics::{half, parse_rational, ratio};
use lambdaset::seqcode::lex_compare;
use lambdaset::{EpSequence, PrecisionConfig, Rational, Word};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TARGETS: [(i64, i64); 4] = [(1, 5), (1, 4), (1, 3), (2, 5)];

fn cfg() -> PrecisionConfig {
    PrecisionConfig::default()
}

fn coding() -> impl Strategy<Value = EpSequence> {
    (
        prop::collection::vec(0u8..2, 1..=10),
        prop::collection::vec(0u8..2, 1..=3),
    )
        .prop_map(|(u, v)| {
            let mut u = u;
            u[0] = 0;
            Word::new(u).unwrap().then_periodic(&Word::new(v).unwrap())
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn psi_inverse_reverses_order(t in 0usize..4, s in coding(), u in coding()) {
        let target = Target::new(&ratio(TARGETS[t].0, TARGETS[t].1)).unwrap();
        prop_assume!(target.is_admissible(&s) && target.is_admissible(&u));
        let (s, u) = match lex_compare(&s, &u) {
            Ordering::Less => (s, u),
            Ordering::Greater => (u, s),
            Ordering::Equal => return Ok(()),
        };
        let (a, b) = (target.psi_inverse(&s, &cfg()).unwrap(), target.psi_inverse(&u, &cfg()).unwrap());
        prop_assume!(!a.intersects(&b));
        prop_assert!(a.lo() >= b.hi());
    }
}

#[test]
fn cover_soundness_against_membership() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (p, q) in [(1, 4), (1, 3)] {
        let x = ratio(p, q);
        let c = cover(&x, 8, &cfg()).unwrap();
        let gaps = cover_gaps(&c);
        for _ in 0..300 {
            let den: i64 = rng.gen_range(3..=200);
            let l = ratio(rng.gen_range(1..den), den);
            if l < x || l > half() {
                continue;
            }
            match membership(&x, &l, 4000).unwrap() {
                Membership::Member => {
                    assert!(c.may_contain(&l), "{l} is in Λ({x}) but not covered")
                }
                Membership::NotMember | Membership::Unknown => {}
            }
            if gaps.iter().any(|g| g.certainly_contains(&l)) {
                assert_ne!(membership(&x, &l, 4000).unwrap(), Membership::Member);
            }
        }
    }
}

#[test]
fn covers_nest() {
    for (p, q) in TARGETS {
        let x = ratio(p, q);
        let mut prev = cover(&x, 1, &cfg()).unwrap();
        for d in 2..=8 {
            let next = cover(&x, d, &cfg()).unwrap();
            for i in &next.intervals {
                assert!(
                    prev.intervals.iter().any(|j| j.contains(i)),
                    "x = {x}, depth {d}"
                );
            }
            prev = next;
        }
    }
}

#[test]
fn covers_reach_both_endpoints() {
    for x in ["1/5", "1/4", "1/3", "2/5", "0.49"] {
        let x: Rational = parse_rational(x).unwrap();
        for d in [1, 4, 7] {
            let c = cover(&x, d, &cfg()).unwrap();
            assert!(c.intervals.first().unwrap().lo.contains_rational(&x));
            assert!(c.intervals.last().unwrap().hi.contains_rational(&half()));
        }
    }
}

/// Counts words of length `m` with a `1` at every multiple of `k`, by
/// dynamic programming over positions.
fn count_forced(m: u32, k: u32) -> u64 {
    let mut count = 1u64;
    for n in 1..=m {
        count *= if n % k == 0 { 1 } else { 2 };
    }
    count
}

#[test]
fn forced_word_counts() {
    for m in 1..=14u32 {
        for k in 1..=6u32 {
            let brute = (0u32..1 << m)
                .filter(|w| {
                    (1..=m)
                        .filter(|n| n % k == 0)
                        .all(|n| w >> (n - 1) & 1 == 1)
                })
                .count() as u64;
            assert_eq!(forced_word_count(m, k), brute);
        }
    }
    for m in 15..=24u32 {
        for k in 1..=6u32 {
            assert_eq!(forced_word_count(m, k), count_forced(m, k));
        }
    }
    let d: f64 = subshift_dim(0.5, 2);
    assert!((d - 0.5).abs() < 1e-15);
}
