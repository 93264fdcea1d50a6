//! The parameter set `Λ(x)` through the order-reversing bijection
//! `Ψ_x : Λ(x) → Ω(x) = {s : (x_n) ≼ s ≼ 01^inf}`.
//!
//! Everything here is an outer approximation: covers contain `Λ(x)`, gaps
//! are certified to miss it, and explicit members come from `Ψ_x^{-1}`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ifs::{greedy_digits, pi_eval, GreedyOutcome};
use crate::numerics::{bisect_monotone, half, Dyadic, Enclosure, PrecisionConfig, Round};
use crate::scalar::Scalar;
use crate::seqcode::{EpSequence, Word};
use crate::Rational;

/// Base-1/2 greedy coding `(x_n) = Ψ_x(1/2)` of `x ∈ (0, 1/2)`.
pub fn binary_expansion(x: &Rational) -> Result<EpSequence> {
    if *x <= Rational::zero() || *x >= half() {
        return Err(Error::OutOfRange(x.to_string()));
    }
    // Remainders have denominators dividing that of x, so a cycle shows up
    // within denom + 1 steps.
    let bound = x
        .denom()
        .to_usize()
        .map_or(usize::MAX, |d| d.saturating_add(2));
    match greedy_digits(x, &half(), bound)? {
        GreedyOutcome::Member { coding, .. } => Ok(coding),
        other => unreachable!("every x in [0,1] has a base-1/2 coding, got {other:?}"),
    }
}

/// A point `x ∈ (0, 1/2)` together with its binary expansion.
#[derive(Clone, Debug)]
pub struct Target {
    x: Rational,
    expansion: EpSequence,
}

impl Target {
    pub fn new(x: &Rational) -> Result<Self> {
        Ok(Target {
            x: x.clone(),
            expansion: binary_expansion(x)?,
        })
    }

    pub fn x(&self) -> &Rational {
        &self.x
    }

    /// `(x_n)`.
    pub fn expansion(&self) -> &EpSequence {
        &self.expansion
    }

    /// `s ∈ Ω(x)`.
    pub fn is_admissible(&self, s: &EpSequence) -> bool {
        &self.expansion <= s && s <= &top_coding()
    }

    /// The unique `λ ∈ [x, 1/2]` with `π_λ(s) = x`.
    pub fn psi_inverse(&self, s: &EpSequence, cfg: &PrecisionConfig) -> Result<Enclosure> {
        if !self.is_admissible(s) {
            return Err(Error::NotAdmissible(s.to_string()));
        }
        if *s == top_coding() {
            return Ok(cfg.enclose(&self.x));
        }
        if *s == self.expansion {
            return Ok(cfg.enclose(&half()));
        }
        let bits = cfg.precision_bits;
        let bracket = Enclosure::new(
            Dyadic::from_rational(&self.x, bits, Round::Down),
            Dyadic::pow2(-1),
            bits,
        );
        bisect_monotone(|l| pi_eval(s, l), &bracket, &self.x, cfg)
    }

    /// All length-`depth` words with an extension in `Ω(x)`, in descending
    /// lexicographic order (ascending in `λ`).
    pub fn admissible_prefixes(&self, depth: usize) -> Vec<Word> {
        assert!((1..64).contains(&depth), "prefix depth must be in 1..64");
        let floor = self.expansion.prefix(depth).to_int();
        let top = (1u64 << (depth - 1)) - 1; // 0 1^(depth-1)
        (floor..=top)
            .rev()
            .map(|v| Word::from_int(v, depth))
            .collect()
    }

    /// `w` has an extension in `Ω(x)`.
    pub fn prefix_is_admissible(&self, w: &Word) -> bool {
        !w.is_empty() && w.bits()[0] == 0 && *w >= self.expansion.prefix(w.len())
    }

    /// Largest and smallest admissible extensions of `w`:
    /// `min(w1^inf, 01^inf)` and `max(w0^inf, (x_n))`.
    pub fn extremal_codings(&self, w: &Word) -> (EpSequence, EpSequence) {
        let top = w.then_ones().min(top_coding());
        let bottom = w.then_zeros().max(self.expansion.clone());
        (top, bottom)
    }

    /// The λ-interval `[Ψ_x^{-1}(top), Ψ_x^{-1}(bottom)]` of a prefix.
    pub fn prefix_interval(&self, w: &Word, cfg: &PrecisionConfig) -> Result<CoverInterval> {
        let (top, bottom) = self.extremal_codings(w);
        Ok(CoverInterval {
            lo: self.psi_inverse(&top, cfg)?,
            hi: self.psi_inverse(&bottom, cfg)?,
            lo_code: Some(top),
            hi_code: Some(bottom),
        })
    }
}

/// `01^inf = Ψ_x(x)`, the top of every `Ω(x)`.
pub fn top_coding() -> EpSequence {
    Word::repeat(0, 1).then_ones()
}

/// See [`Target::psi_inverse`].
pub fn psi_inverse(x: &Rational, s: &EpSequence, cfg: &PrecisionConfig) -> Result<Enclosure> {
    Target::new(x)?.psi_inverse(s, cfg)
}

/// See [`Target::admissible_prefixes`].
pub fn admissible_prefixes(x: &Rational, depth: usize) -> Result<Vec<Word>> {
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    Ok(Target::new(x)?.admissible_prefixes(depth))
}

/// One closed interval of a cover, with certified endpoint enclosures.
#[derive(Clone, Debug, Serialize)]
pub struct CoverInterval {
    pub lo: Enclosure,
    pub hi: Enclosure,
    /// Coding mapped to `lo`, when the interval comes from a single target.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lo_code: Option<EpSequence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hi_code: Option<EpSequence>,
}

impl CoverInterval {
    /// Outer length `hi.hi - lo.lo`.
    pub fn outer_length(&self) -> Dyadic {
        self.hi.hi().sub(self.lo.lo())
    }

    /// Whether `λ` may lie in the interval.
    pub fn may_contain(&self, lambda: &Rational) -> bool {
        self.lo.lo().to_rational() <= *lambda && *lambda <= self.hi.hi().to_rational()
    }

    /// Outer hull contains the other's outer hull.
    pub fn contains(&self, other: &CoverInterval) -> bool {
        self.lo.lo() <= other.lo.lo() && other.hi.hi() <= self.hi.hi()
    }
}

/// A finite union of closed λ-intervals containing `Λ(x)` (or an
/// intersection of several such sets).
#[derive(Clone, Debug, Serialize)]
pub struct IntervalCover {
    #[serde(serialize_with = "crate::numerics::rational_str::vec::serialize")]
    pub targets: Vec<Rational>,
    pub depth: usize,
    pub intervals: Vec<CoverInterval>,
    pub precision: PrecisionConfig,
}

impl IntervalCover {
    /// Total outer length.
    pub fn total_length(&self) -> Dyadic {
        self.intervals
            .iter()
            .fold(Dyadic::zero(), |acc, i| acc.add(&i.outer_length()))
    }

    pub fn may_contain(&self, lambda: &Rational) -> bool {
        self.intervals.iter().any(|i| i.may_contain(lambda))
    }
}

/// Open interval between two consecutive cover intervals; misses `Λ(x)`.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaGap {
    pub left_end: Enclosure,
    pub right_end: Enclosure,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left_code: Option<EpSequence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right_code: Option<EpSequence>,
}

impl LambdaGap {
    /// `λ` lies certainly inside the open gap.
    pub fn certainly_contains(&self, lambda: &Rational) -> bool {
        self.left_end.hi().to_rational() < *lambda && *lambda < self.right_end.lo().to_rational()
    }
}

/// Sorts intervals and merges those whose enclosures touch or overlap.
pub(crate) fn merge_touching(mut intervals: Vec<CoverInterval>) -> Vec<CoverInterval> {
    intervals.sort_by(|a, b| a.lo.lo().cmp(b.lo.lo()));
    let mut out: Vec<CoverInterval> = Vec::with_capacity(intervals.len());
    for iv in intervals {
        match out.last_mut() {
            Some(prev) if prev.hi.hi() >= iv.lo.lo() => {
                if iv.hi.hi() > prev.hi.hi() {
                    prev.hi = iv.hi;
                    prev.hi_code = iv.hi_code;
                }
            }
            _ => out.push(iv),
        }
    }
    out
}

/// Outer cover of `Λ(x)` by the images of all admissible depth-`depth`
/// prefixes.
pub fn cover(x: &Rational, depth: usize, cfg: &PrecisionConfig) -> Result<IntervalCover> {
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    cfg.validate()?;
    let target = Target::new(x)?;
    let intervals = target
        .admissible_prefixes(depth)
        .par_iter()
        .map(|w| target.prefix_interval(w, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntervalCover {
        targets: vec![x.clone()],
        depth,
        intervals: merge_touching(intervals),
        precision: cfg.clone(),
    })
}

/// Gaps of a cover, left to right.
pub fn cover_gaps(cover: &IntervalCover) -> Vec<LambdaGap> {
    cover
        .intervals
        .windows(2)
        .map(|pair| LambdaGap {
            left_end: pair[0].hi.clone(),
            right_end: pair[1].lo.clone(),
            left_code: pair[0].hi_code.clone(),
            right_code: pair[1].lo_code.clone(),
        })
        .collect()
}

/// Gaps of `Λ(x)` visible at prefix depth `depth`.
pub fn gaps(x: &Rational, depth: usize, cfg: &PrecisionConfig) -> Result<Vec<LambdaGap>> {
    Ok(cover_gaps(&cover(x, depth, cfg)?))
}

/// Outcome of the sampled bi-Lipschitz check.
#[derive(Clone, Debug, Serialize)]
pub struct LipschitzReport {
    #[serde(with = "crate::numerics::rational_str")]
    pub x: Rational,
    #[serde(with = "crate::numerics::rational_str")]
    pub lambda: Rational,
    /// `x(1-2λ)^2/λ`.
    #[serde(with = "crate::numerics::rational_str")]
    pub constant: Rational,
    /// Smallest certified lower bound of the sampled ratios.
    #[serde(with = "crate::numerics::rational_str")]
    pub min_ratio: Rational,
    pub pairs: usize,
    pub violations: usize,
}

impl LipschitzReport {
    pub fn holds(&self) -> bool {
        self.violations == 0 && self.min_ratio >= self.constant
    }
}

fn random_admissible_coding<R: Rng>(target: &Target, rng: &mut R) -> EpSequence {
    loop {
        let len = rng.gen_range(2..=18);
        let mut w = Word::repeat(0, 1);
        for _ in 1..len {
            w.push(rng.gen_range(0..=1));
        }
        let tail = match rng.gen_range(0..4) {
            0 => Word::repeat(0, 1),
            1 => Word::repeat(1, 1),
            _ => {
                let plen = rng.gen_range(1..=4);
                Word::new((0..plen).map(|_| rng.gen_range(0..=1)).collect()).expect("binary")
            }
        };
        let s = w.then_periodic(&tail);
        if target.is_admissible(&s) {
            return s;
        }
    }
}

/// Samples pairs `λ1 < λ2` in `Λ(x) ∩ [x, λ]` and checks
/// `|π_λ(Ψ_x(λ1)) - π_λ(Ψ_x(λ2))| >= C |λ1 - λ2|` with `C = x(1-2λ)^2/λ`.
///
/// Numerators are exact (rational codings at rational `λ`); denominators use
/// the upper end of the enclosures, so every reported ratio is a certified
/// lower bound.
pub fn lipschitz_check(
    x: &Rational,
    lambda: &Rational,
    samples: usize,
    seed: u64,
    cfg: &PrecisionConfig,
) -> Result<LipschitzReport> {
    let target = Target::new(x)?;
    if !(x < lambda && *lambda < half()) {
        return Err(Error::InvalidInput(format!(
            "need x < λ < 1/2, got λ = {lambda}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = lambda.clone();
    // Draw candidate codings, keep those whose parameter lies below the cap.
    let wanted = samples + 1;
    let mut members: Vec<(EpSequence, Enclosure)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut attempts = 0usize;
    while members.len() < wanted && attempts < 40 * wanted + 100 {
        let batch: Vec<EpSequence> = (0..64)
            .map(|_| random_admissible_coding(&target, &mut rng))
            .filter(|s| seen.insert(s.normalized().to_string()))
            .collect();
        attempts += 64;
        let solved = batch
            .par_iter()
            .map(|s| target.psi_inverse(s, cfg).map(|e| (s.clone(), e)))
            .collect::<Result<Vec<_>>>()?;
        members.extend(
            solved
                .into_iter()
                .filter(|(_, e)| e.hi().to_rational() <= cap),
        );
    }
    members.truncate(wanted.max(2));
    if members.len() < 2 {
        return Err(Error::InsufficientMembers);
    }
    members.sort_by(|a, b| a.1.lo().cmp(b.1.lo()));

    // Neighbours in λ-order are the hardest pairs; add random ones for spread.
    let mut pairs: Vec<(usize, usize)> = (0..members.len() - 1).map(|i| (i, i + 1)).collect();
    pairs.truncate(samples.div_ceil(2));
    while pairs.len() < samples {
        let mut idx: Vec<usize> = (0..members.len()).collect();
        idx.shuffle(&mut rng);
        let (i, j) = (idx[0].min(idx[1]), idx[0].max(idx[1]));
        pairs.push((i, j));
    }

    let constant =
        x * (Rational::one() - Rational::from_integer(BigInt::from(2)) * lambda).pow(2) / lambda;
    let mut min_ratio: Option<Rational> = None;
    let mut violations = 0;
    for &(i, j) in &pairs {
        let (s1, l1) = &members[i];
        let (s2, l2) = &members[j];
        if s1 == s2 {
            continue;
        }
        let num = (pi_eval(s1, &cap) - pi_eval(s2, &cap)).abs();
        let den = l2.hi().to_rational() - l1.lo().to_rational();
        if !den.is_positive() {
            continue;
        }
        let ratio = num / den;
        if ratio < constant {
            violations += 1;
        }
        min_ratio = Some(match min_ratio {
            Some(m) if m <= ratio => m,
            _ => ratio,
        });
    }
    Ok(LipschitzReport {
        x: x.clone(),
        lambda: lambda.clone(),
        constant,
        min_ratio: min_ratio.ok_or(Error::InsufficientMembers)?,
        pairs: pairs.len(),
        violations,
    })
}

/// Dimension `(k-1) log 2 / (k (-log λ))` of `π_λ` of the sequences with a
/// forced `1` at every multiple of `k`.
pub fn subshift_dim<F: num_traits::Float>(lambda: F, k: u32) -> F {
    let k = F::from(k).expect("k fits the float type");
    let two = F::one() + F::one();
    (k - F::one()) * two.ln() / (k * -lambda.ln())
}

/// Number of length-`m` words with a `1` at every index divisible by `k`.
pub fn forced_word_count(m: u32, k: u32) -> u64 {
    1u64 << (m - m / k)
}

/// Box-counting estimate of the local dimension of `Λ(x)` on a window.
#[derive(Clone, Debug, Serialize)]
pub struct BoxDimReport {
    pub slope: f64,
    pub stderr: f64,
    /// `(j, N(2^-j), prefix depth used)` per scale.
    pub points: Vec<(u32, usize, usize)>,
}

#[derive(Clone, Debug)]
struct Node {
    word: Word,
    interval: CoverInterval,
}

/// Counts `2^-j` grid boxes meeting the cover restricted to `(a, b)`, for
/// each `j` in `scales`, with the prefix depth raised until every interval
/// meeting the window is at most `2^-j / 4` long; the slope of
/// `log N` against `j log 2` estimates the dimension.
pub fn box_dim_estimate(
    x: &Rational,
    window: (&Rational, &Rational),
    scales: &[u32],
    max_depth: usize,
    cfg: &PrecisionConfig,
) -> Result<BoxDimReport> {
    let (a, b) = window;
    let target = Target::new(x)?;
    let lo_clip = std::cmp::max(a, x).clone();
    let hi_clip = std::cmp::min(b.clone(), half());
    if lo_clip >= hi_clip {
        return Err(Error::InvalidInput("window misses [x, 1/2]".into()));
    }
    if scales.len() < 2 {
        return Err(Error::InvalidInput("need at least two scales".into()));
    }
    let meets = |iv: &CoverInterval| {
        iv.lo.lo().to_rational() < hi_clip && lo_clip < iv.hi.hi().to_rational()
    };

    let root = Word::repeat(0, 1);
    let mut nodes = vec![Node {
        interval: target.prefix_interval(&root, cfg)?,
        word: root,
    }];
    let mut depth = 1;
    let mut scales: Vec<u32> = scales.to_vec();
    scales.sort_unstable();
    let mut points = Vec::new();
    for &j in &scales {
        let quarter = Dyadic::pow2(-(j as i64) - 2);
        while nodes.iter().any(|n| n.interval.outer_length() > quarter) {
            depth += 1;
            if depth > max_depth {
                return Err(Error::DepthBudgetExceeded(max_depth as u32));
            }
            nodes = refine(&target, &nodes, cfg)?
                .into_iter()
                .filter(|n| meets(&n.interval))
                .collect();
        }
        let mut boxes = BTreeSet::new();
        let a_d = Dyadic::from_rational(&lo_clip, 256, Round::Down);
        let b_d = Dyadic::from_rational(&hi_clip, 256, Round::Up);
        for n in &nodes {
            let lo = std::cmp::max(n.interval.lo.lo(), &a_d);
            let hi = std::cmp::min(n.interval.hi.hi(), &b_d);
            if lo > hi {
                continue;
            }
            let first = lo.floor_scaled(j as i64);
            let last = hi.floor_scaled(j as i64);
            let mut i = first;
            while i <= last {
                boxes.insert(i.clone());
                i += 1;
            }
        }
        points.push((j, boxes.len(), depth));
    }

    let xs: Vec<f64> = points
        .iter()
        .map(|p| p.0 as f64 * std::f64::consts::LN_2)
        .collect();
    let ys: Vec<f64> = points.iter().map(|p| (p.1.max(1) as f64).ln()).collect();
    let (slope, stderr) = least_squares_slope(&xs, &ys);
    Ok(BoxDimReport {
        slope,
        stderr,
        points,
    })
}

fn refine(target: &Target, nodes: &[Node], cfg: &PrecisionConfig) -> Result<Vec<Node>> {
    let children: Vec<Vec<Node>> = nodes
        .par_iter()
        .map(|n| {
            let mut out = Vec::with_capacity(2);
            // `w1` keeps the parent's top coding, `w0` its bottom coding.
            for digit in [1u8, 0] {
                let w = n.word.with(digit);
                if !target.prefix_is_admissible(&w) {
                    continue;
                }
                let (top, bottom) = target.extremal_codings(&w);
                let lo = if Some(&top) == n.interval.lo_code.as_ref() {
                    n.interval.lo.clone()
                } else {
                    target.psi_inverse(&top, cfg)?
                };
                let hi = if Some(&bottom) == n.interval.hi_code.as_ref() {
                    n.interval.hi.clone()
                } else {
                    target.psi_inverse(&bottom, cfg)?
                };
                out.push(Node {
                    word: w,
                    interval: CoverInterval {
                        lo,
                        hi,
                        lo_code: Some(top),
                        hi_code: Some(bottom),
                    },
                });
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(children.into_iter().flatten().collect())
}

/// Ordinary least squares slope and its standard error.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    if xs.len() <= 2 {
        return (slope, 0.0);
    }
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    (slope, (ssr / (n - 2.0) / sxx).sqrt())
}

/// `Λ(x) = Λ(1-x)`: maps `x ∈ (1/2, 1)` to `1 - x`.
pub fn reduce_symmetric(x: &Rational) -> (Rational, bool) {
    if *x > half() && *x < Rational::one() {
        (Rational::one() - x, true)
    } else {
        (x.clone(), false)
    }
}

/// Smallest cover interval containing `λ`, if any (helper for reports).
pub fn locate<'a>(cover: &'a IntervalCover, lambda: &Rational) -> Option<&'a CoverInterval> {
    cover.intervals.iter().find(|i| i.may_contain(lambda))
}

/// Whether an enclosure certainly sits below the other.
pub fn certainly_below(a: &Enclosure, b: &Enclosure) -> bool {
    a.certainly_lt(b)
}
