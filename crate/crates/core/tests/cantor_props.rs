use lambdaset::cantor_metrics::{middle_alpha, newhouse_lower, thickness_of, DefiningSequence};
use lambdaset::numerics::ratio;
use lambdaset::Rational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn alpha() -> impl Strategy<Value = Rational> {
    (1i64..40, 2i64..41).prop_filter_map("0 < α < 1", |(p, q)| (p < q).then(|| ratio(p, q)))
}

/// A well-formed sequence: each step removes a random open middle part of a
/// random remaining component.
fn random_sequence() -> impl Strategy<Value = DefiningSequence<Rational>> {
    prop::collection::vec((0usize..64, 1i64..8, 1i64..8, 1i64..8), 1..12).prop_map(|steps| {
        let mut comps = vec![(Rational::zero(), Rational::one())];
        let mut gaps = Vec::new();
        for (pick, a, b, c) in steps {
            let (lo, hi) = comps.remove(pick % comps.len());
            let total = Rational::from_integer((a + b + c).into());
            let len = &hi - &lo;
            let g_lo = &lo + &len * ratio(a, 1) / &total;
            let g_hi = &g_lo + &len * ratio(b, 1) / &total;
            gaps.push((g_lo.clone(), g_hi.clone()));
            comps.push((lo, g_lo));
            comps.push((g_hi, hi));
        }
        DefiningSequence::new((Rational::zero(), Rational::one()), gaps)
    })
}

proptest! {
    #[test]
    fn thickness_is_scale_free(ds in random_sequence(), a in 1i64..50, b in -50i64..50) {
        let scaled = ds.affine(&ratio(a, 7), &ratio(b, 3));
        prop_assert_eq!(thickness_of(&scaled).unwrap(), thickness_of(&ds).unwrap());
    }

    #[test]
    fn more_removals_never_thicken(ds in random_sequence()) {
        for n in 1..ds.removals.len() {
            prop_assert!(thickness_of(&ds.truncated(n + 1)).unwrap() <= thickness_of(&ds.truncated(n)).unwrap());
        }
    }

    #[test]
    fn newhouse_is_increasing_and_below_one(t in 1e-6f64..1e6, f in 1.0001f64..10.0) {
        let (a, b) = (newhouse_lower(t).unwrap(), newhouse_lower(t * f).unwrap());
        prop_assert!(a < b && b < 1.0 && a > 0.0);
    }

    #[test]
    fn middle_alpha_matches_formula(a in alpha(), levels in 1u32..5) {
        let expected = (Rational::one() - &a) / (&a * ratio(2, 1));
        prop_assert_eq!(thickness_of(&middle_alpha(&a, levels)).unwrap(), expected);
    }
}
