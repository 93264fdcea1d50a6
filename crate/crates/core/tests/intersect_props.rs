use lambdaset::intersect::{find_common, intersect_covers, replay_exact, CertificateStatus};
use lambdaset::lambda_set::{cover, IntervalCover};
use lambdaset::numerics::{half, ratio};
use lambdaset::{Dyadic, PrecisionConfig, Rational};
use proptest::prelude::*;

fn cfg() -> PrecisionConfig {
    PrecisionConfig::default()
}

fn hulls(c: &IntervalCover) -> Vec<(Dyadic, Dyadic)> {
    c.intervals
        .iter()
        .map(|i| (i.lo.lo().clone(), i.hi.hi().clone()))
        .collect()
}

#[test]
fn intersection_is_commutative_and_associative() {
    let [a, b, c] = [(1, 3), (1, 4), (2, 7)].map(|(p, q)| cover(&ratio(p, q), 6, &cfg()).unwrap());
    let ab = intersect_covers(&[a.clone(), b.clone()]);
    let ba = intersect_covers(&[b.clone(), a.clone()]);
    assert_eq!(hulls(&ab), hulls(&ba));
    let left = intersect_covers(&[ab, c.clone()]);
    let right = intersect_covers(&[a.clone(), intersect_covers(&[b.clone(), c.clone()])]);
    assert_eq!(hulls(&left), hulls(&right));
    assert_eq!(hulls(&left), hulls(&intersect_covers(&[c, b, a])));
}

#[test]
fn exact_certificates_replay() {
    for targets in [
        vec![ratio(1, 3), ratio(1, 4)],
        vec![ratio(1, 3)],
        vec![ratio(1, 5), ratio(1, 4)],
    ] {
        let certs = find_common(&targets, 5, &cfg()).unwrap();
        assert!(certs.iter().any(|c| c.lambda_exact == Some(half())));
        for c in certs
            .iter()
            .filter(|c| c.status == CertificateStatus::Exact)
        {
            assert!(replay_exact(c), "{:?}", c.lambda_exact);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn certificates_stay_in_range(a in 1i64..50, b in 1i64..50) {
        let targets: Vec<Rational> = vec![ratio(a, 100), ratio(b, 100)];
        let floor = targets.iter().max().unwrap().clone();
        for c in find_common(&targets, 4, &cfg()).unwrap() {
            prop_assert!(c.lambda.hi().to_rational() >= floor);
            prop_assert!(c.lambda.lo().to_rational() <= half());
        }
    }
}
