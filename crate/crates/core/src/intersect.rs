//! Common parameters of several targets: covers of `⋂ Λ(y_i)`, certified
//! common points, and per-target thickness bounds.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cantor_metrics::newhouse_lower;
use crate::constructions::thickness_cl;
use crate::error::{Error, Result};
use crate::ifs::{greedy_digits, GreedyOutcome};
use crate::lambda_set::{cover, merge_touching, CoverInterval, IntervalCover, Target};
use crate::numerics::{half, Dyadic, Enclosure, PrecisionConfig};
use crate::scalar::Scalar;
use crate::seqcode::{EpSequence, Word};
use crate::Rational;

/// Intersection of two unions of closed intervals, outer-rounded.
fn intersect_pair(a: &IntervalCover, b: &IntervalCover) -> IntervalCover {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.intervals.len() && j < b.intervals.len() {
        let (p, q) = (&a.intervals[i], &b.intervals[j]);
        let lo = if p.lo.lo() >= q.lo.lo() { &p.lo } else { &q.lo };
        let hi = if p.hi.hi() <= q.hi.hi() { &p.hi } else { &q.hi };
        if lo.lo() <= hi.hi() {
            out.push(CoverInterval {
                lo: lo.clone(),
                hi: hi.clone(),
                lo_code: None,
                hi_code: None,
            });
        }
        if p.hi.hi() <= q.hi.hi() {
            i += 1;
        } else {
            j += 1;
        }
    }
    let mut targets = a.targets.clone();
    targets.extend(b.targets.iter().cloned());
    IntervalCover {
        targets,
        depth: a.depth.min(b.depth),
        intervals: merge_touching(out),
        precision: a.precision.clone(),
    }
}

/// Outer cover of `⋂ Λ(y_i)` from covers of each `Λ(y_i)`.
pub fn intersect_covers(covers: &[IntervalCover]) -> IntervalCover {
    match covers.split_first() {
        None => IntervalCover {
            targets: vec![],
            depth: 0,
            intervals: vec![],
            precision: PrecisionConfig::default(),
        },
        Some((first, rest)) => {
            let mut acc = first.clone();
            if rest.is_empty() {
                // A single cover keeps its codings.
                return acc;
            }
            for c in rest {
                acc = intersect_pair(&acc, c);
            }
            acc
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateStatus {
    /// Rational `λ`; every coding found by the exact greedy algorithm.
    Exact,
    /// Every target's coding solved to an enclosure; the enclosures overlap
    /// and are narrower than the tolerance.
    Certified,
    /// Overlapping enclosures that miss the width tolerance.
    Candidate,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommonPointCertificate {
    #[serde(serialize_with = "crate::numerics::rational_str::vec::serialize")]
    pub targets: Vec<Rational>,
    pub lambda: Enclosure,
    /// Exact value when `λ` is rational.
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "opt_rational"
    )]
    pub lambda_exact: Option<Rational>,
    pub per_target_codings: Vec<EpSequence>,
    pub status: CertificateStatus,
}

fn opt_rational<S: serde::Serializer>(
    r: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

/// Search settings for [`find_common_with`].
#[derive(Clone, Debug)]
pub struct CommonSearch {
    /// Longest `|u| + |v|` of the codings `u v^inf` proposed for the first target.
    pub search_depth: usize,
    /// Certified enclosures must be at most `2^-tolerance_log2` wide.
    pub tolerance_log2: u32,
    /// Largest denominator tried by the exact rational search.
    pub max_denominator: u64,
}

impl CommonSearch {
    pub fn new(search_depth: usize) -> Self {
        CommonSearch {
            search_depth,
            tolerance_log2: 60,
            max_denominator: 8 * search_depth as u64,
        }
    }
}

/// Certificates of common points of `Λ(y_1), …, Λ(y_p)`, sorted by `λ`.
pub fn find_common(
    targets: &[Rational],
    search_depth: usize,
    cfg: &PrecisionConfig,
) -> Result<Vec<CommonPointCertificate>> {
    find_common_with(targets, &CommonSearch::new(search_depth), cfg)
}

pub fn find_common_with(
    targets: &[Rational],
    search: &CommonSearch,
    cfg: &PrecisionConfig,
) -> Result<Vec<CommonPointCertificate>> {
    if targets.is_empty() {
        return Err(Error::InvalidInput("no targets".into()));
    }
    let tgts = targets
        .iter()
        .map(Target::new)
        .collect::<Result<Vec<_>>>()?;
    let floor = targets.iter().max().expect("nonempty").clone();

    let mut certs = vec![CommonPointCertificate {
        targets: targets.to_vec(),
        lambda: cfg.enclose(&half()),
        lambda_exact: Some(half()),
        per_target_codings: tgts.iter().map(|t| t.expansion().clone()).collect(),
        status: CertificateStatus::Exact,
    }];

    let depth = search.search_depth.clamp(1, 16);
    let covers = targets
        .par_iter()
        .map(|y| cover(y, depth, cfg))
        .collect::<Result<Vec<_>>>()?;
    let common = intersect_covers(&covers);

    // Rationals p/q in [max y, 1/2) with eventually periodic greedy codings.
    let mut exact_lambdas: HashSet<Rational> = HashSet::new();
    let candidates: Vec<Rational> = (2..=search.max_denominator.max(2))
        .flat_map(|q| {
            let lo = (&floor * Rational::from_integer(BigInt::from(q)))
                .ceil()
                .to_integer();
            let hi = (q - 1) / 2 + 1; // p < q/2 strictly
            let lo = lo.to_u64().unwrap_or(hi).max(1);
            (lo..hi).map(move |p| Rational::new(BigInt::from(p), BigInt::from(q)))
        })
        .filter(|l| *l >= floor && *l < half() && common.may_contain(l))
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    let mut exact: Vec<CommonPointCertificate> = candidates
        .par_iter()
        .filter_map(|l| {
            let codings = targets
                .iter()
                .map(|y| match greedy_digits(y, l, 512) {
                    Ok(GreedyOutcome::Member { coding, .. }) => Some(coding),
                    _ => None,
                })
                .collect::<Option<Vec<_>>>()?;
            Some(CommonPointCertificate {
                targets: targets.to_vec(),
                lambda: cfg.enclose(l),
                lambda_exact: Some(l.clone()),
                per_target_codings: codings,
                status: CertificateStatus::Exact,
            })
        })
        .collect();
    for c in &exact {
        exact_lambdas.insert(c.lambda_exact.clone().expect("exact"));
    }
    certs.append(&mut exact);

    // Eventually periodic codings of the first target; propose codings of
    // the others from an interval greedy run at the solved λ.
    let tol = Dyadic::pow2(-(search.tolerance_log2 as i64));
    let proposals = ep_codings(search.search_depth)
        .into_iter()
        .filter(|s| tgts[0].is_admissible(s) && s != tgts[0].expansion())
        .collect::<Vec<_>>();
    let found: Vec<CommonPointCertificate> = proposals
        .par_iter()
        .filter_map(|s0| {
            let l0 = tgts[0].psi_inverse(s0, cfg).ok()?;
            if !common
                .intervals
                .iter()
                .any(|iv| iv.lo.lo() <= l0.hi() && l0.lo() <= iv.hi.hi())
            {
                return None;
            }
            let mut codings = vec![s0.clone()];
            let mut lambda = l0.clone();
            for t in &tgts[1..] {
                let s = propose_coding(t.x(), &l0)?;
                if !t.is_admissible(&s) {
                    return None;
                }
                let l = t.psi_inverse(&s, cfg).ok()?;
                lambda = lambda.intersection(&l)?;
                codings.push(s);
            }
            if exact_lambdas.iter().any(|r| lambda.contains_rational(r)) {
                return None;
            }
            let status = if l0.width() <= tol && lambda.width() <= tol {
                CertificateStatus::Certified
            } else {
                CertificateStatus::Candidate
            };
            Some(CommonPointCertificate {
                targets: targets.to_vec(),
                lambda,
                lambda_exact: None,
                per_target_codings: codings,
                status,
            })
        })
        .collect();
    certs.extend(found);

    certs.sort_by(|a, b| {
        a.lambda
            .lo()
            .cmp(b.lambda.lo())
            .then(a.status.cmp(&b.status))
            .then_with(|| {
                a.per_target_codings
                    .iter()
                    .map(ToString::to_string)
                    .cmp(b.per_target_codings.iter().map(ToString::to_string))
            })
    });
    certs.dedup_by(|b, a| {
        a.lambda.intersects(&b.lambda) && a.per_target_codings == b.per_target_codings
    });
    // Λ(y) ⊆ [y, 1/2].
    let floor_d = Dyadic::from_rational(&floor, cfg.precision_bits, crate::numerics::Round::Down);
    certs.retain(|c| c.lambda.hi() >= &floor_d);
    Ok(certs)
}

/// Normalized eventually periodic codings `u v^inf` starting with `0`, with
/// `|u| + |v| <= depth`.
fn ep_codings(depth: usize) -> Vec<EpSequence> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for total in 1..=depth.min(14) {
        for per_len in 1..=total {
            let pre_len = total - per_len;
            for bits in 0..(1u64 << total) {
                let w = Word::from_int(bits, total);
                let (u, v) = (
                    w.prefix(pre_len),
                    Word::new(w.bits()[pre_len..].to_vec()).expect("binary"),
                );
                let s = u.then_periodic(&v);
                if s.digit(1) != 0 {
                    continue;
                }
                let n = s.normalized();
                if seen.insert(n.to_string()) {
                    out.push(n);
                }
            }
        }
    }
    out
}

/// Runs the greedy algorithm for `y` on an enclosure of `λ` while the digits
/// are decided, then proposes the shortest eventually periodic sequence
/// consistent with them (at least three repetitions of the period).
fn propose_coding(y: &Rational, lambda: &Enclosure) -> Option<EpSequence> {
    let bits = lambda.bits();
    let one = Enclosure::one();
    let one_minus = one - lambda.clone();
    let mut r = Enclosure::from_rational(y, bits);
    let mut digits: Vec<u8> = Vec::new();
    for _ in 0..200 {
        if r.width() > Dyadic::pow2(-8) {
            break;
        }
        if one_minus.certainly_le(&r) {
            digits.push(1);
            r = (r - one_minus.clone()).checked_div(lambda)?;
        } else if r.certainly_le(lambda) {
            digits.push(0);
            r = r.checked_div(lambda)?;
        } else if lambda.certainly_lt(&r) && r.certainly_lt(&one_minus) {
            return None;
        } else {
            break;
        }
    }
    let n = digits.len();
    for total in 1..=n / 3 {
        for per in 1..=total {
            let pre = total - per;
            if n < pre + 3 * per {
                continue;
            }
            if (pre + per..n).all(|i| digits[i] == digits[i - per]) {
                let u = Word::new(digits[..pre].to_vec()).ok()?;
                let v = Word::new(digits[pre..pre + per].to_vec()).ok()?;
                return Some(u.then_periodic(&v).normalized());
            }
        }
    }
    None
}

/// Newhouse bound at one `ℓ` for one target.
#[derive(Clone, Debug, Serialize)]
pub struct EllBound {
    pub ell: usize,
    pub tau_lo: f64,
    pub newhouse: f64,
    pub bound_violations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TargetBounds {
    #[serde(with = "crate::numerics::rational_str")]
    pub target: Rational,
    pub per_ell: Vec<EllBound>,
    pub best: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductDimReport {
    pub k_max: usize,
    pub q_max: u32,
    pub per_target: Vec<TargetBounds>,
    /// `min_i newhouse(τ(C_ℓ(y_i)))` per `ℓ`.
    pub combined_min: Vec<(usize, f64)>,
    pub combination: &'static str,
}

/// Per-target lower bounds `log 2 / log(2 + 1/τ(C_ℓ(y_i)))` over `ℓ`, and
/// their minimum. The minimum is reported as a heuristic summary only; it
/// is not a bound on the dimension of the intersection.
pub fn product_dim_report(
    targets: &[Rational],
    ells: std::ops::RangeInclusive<usize>,
    k_max: usize,
    q_max: u32,
    cfg: &PrecisionConfig,
) -> Result<ProductDimReport> {
    if targets.is_empty() {
        return Err(Error::InvalidInput("no targets".into()));
    }
    let ells: Vec<usize> = ells.collect();
    let per_target = targets
        .iter()
        .map(|y| {
            let per_ell = ells
                .par_iter()
                .map(|&ell| {
                    let r = thickness_cl(y, ell, k_max, q_max, cfg)?;
                    let tau_lo = r.tau_truncated.to_f64();
                    Ok(EllBound {
                        ell,
                        tau_lo,
                        newhouse: if tau_lo > 0.0 {
                            newhouse_lower(tau_lo)?
                        } else {
                            0.0
                        },
                        bound_violations: r.bound_violations.len(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let best = per_ell.iter().map(|b| b.newhouse).fold(0.0, f64::max);
            Ok(TargetBounds {
                target: y.clone(),
                per_ell,
                best,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let combined_min = ells
        .iter()
        .enumerate()
        .map(|(i, &ell)| {
            let m = per_target
                .iter()
                .map(|t| t.per_ell[i].newhouse)
                .fold(f64::INFINITY, f64::min);
            (ell, m)
        })
        .collect();
    Ok(ProductDimReport {
        k_max,
        q_max,
        per_target,
        combined_min,
        combination:
            "heuristic: minimum of per-target Newhouse bounds; not a bound for the intersection",
    })
}

/// Replays an Exact certificate with the exact greedy algorithm.
pub fn replay_exact(cert: &CommonPointCertificate) -> bool {
    let Some(l) = &cert.lambda_exact else {
        return false;
    };
    if *l == half() {
        return cert
            .targets
            .iter()
            .all(|y| *y > Rational::zero() && *y < Rational::one());
    }
    cert.targets.iter().zip(&cert.per_target_codings).all(|(y, s)| {
        matches!(greedy_digits(y, l, 4096), Ok(GreedyOutcome::Member { coding, .. }) if coding == *s)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ratio;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    #[test]
    fn intersection_examples() {
        let a = cover(&ratio(1, 3), 6, &cfg()).unwrap();
        let full = cover(&ratio(1, 5), 1, &cfg()).unwrap();
        let clipped = intersect_covers(&[a.clone(), full]);
        assert_eq!(clipped.intervals.len(), a.intervals.len());
        let b = cover(&ratio(1, 4), 6, &cfg()).unwrap();
        let both = intersect_covers(&[a.clone(), b.clone()]);
        assert!(!both.intervals.is_empty());
        assert!(both.total_length() < std::cmp::min(a.total_length(), b.total_length()));
        assert!(both.may_contain(&half()));
        assert!(both.intervals.last().unwrap().hi.contains_rational(&half()));
    }

    #[test]
    fn single_target_has_exact_half() {
        let c = find_common(&[ratio(2, 7)], 3, &cfg()).unwrap();
        let top = c.last().unwrap();
        assert_eq!(top.status, CertificateStatus::Exact);
        assert_eq!(top.lambda_exact, Some(half()));
        assert_eq!(top.per_target_codings[0], "(010)".parse().unwrap());
    }

    #[test]
    fn range_is_respected() {
        let c = find_common(&[ratio(49, 100), ratio(1, 100)], 4, &cfg()).unwrap();
        assert!(c.iter().any(|c| c.lambda_exact == Some(half())));
        let floor = ratio(49, 100);
        assert!(c.iter().all(|c| c.lambda.hi().to_rational() >= floor));
    }

    #[test]
    fn codings_are_proposed_from_digits() {
        let l = Enclosure::from_rational(&ratio(1, 3), 128);
        assert_eq!(
            propose_coding(&ratio(1, 4), &l),
            Some("(01)".parse().unwrap())
        );
        // Remainder on a branch boundary: undecided.
        assert_eq!(propose_coding(&ratio(1, 3), &l), None);
    }

    #[test]
    fn golden_point_is_common_to_third_and_quarter() {
        let c = find_common(&[ratio(1, 3), ratio(1, 4)], 6, &cfg()).unwrap();
        let g = (3.0 - 5f64.sqrt()) / 2.0;
        let hit = c
            .iter()
            .find(|c| (c.lambda.to_f64() - g).abs() < 1e-12)
            .expect("root of t^2 - 3t + 1");
        assert_eq!(hit.status, CertificateStatus::Certified);
        assert!(hit.lambda.width() <= Dyadic::pow2(-60));
        assert!(c
            .iter()
            .any(|c| c.lambda_exact == Some(ratio(1, 3)) && replay_exact(c)));
        assert!(c.windows(2).all(|w| w[0].lambda.lo() <= w[1].lambda.lo()));
    }

    #[test]
    fn product_report_needs_targets() {
        assert!(product_dim_report(&[], 2..=3, 3, 1, &cfg()).is_err());
    }
}
