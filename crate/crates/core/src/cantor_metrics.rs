//! Defining sequences of Cantor sets, bridges, thickness and the Newhouse
//! dimension bound.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Rational;

/// A closed hull and the open gaps removed from it, in removal order.
///
/// Well-formed when every gap sits strictly inside the component of
/// `hull \ (V_1 ∪ … ∪ V_{n-1})` that contains it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefiningSequence<S> {
    pub hull: (S, S),
    #[serde(rename = "gaps")]
    pub removals: Vec<(S, S)>,
}

/// The two closed bridges flanking a gap at the moment it is removed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BridgePair<S> {
    pub left: (S, S),
    pub right: (S, S),
}

impl<S: Scalar> BridgePair<S> {
    pub fn left_len(&self) -> S {
        self.left.1.clone() - self.left.0.clone()
    }

    pub fn right_len(&self) -> S {
        self.right.1.clone() - self.right.0.clone()
    }
}

impl<S: Scalar> DefiningSequence<S> {
    pub fn new(hull: (S, S), removals: Vec<(S, S)>) -> Self {
        DefiningSequence { hull, removals }
    }

    /// Gap lengths are nonincreasing (certified).
    pub fn is_ordered(&self) -> bool {
        self.removals.windows(2).all(|w| {
            let a = w[0].1.clone() - w[0].0.clone();
            let b = w[1].1.clone() - w[1].0.clone();
            b.certainly_le(&a)
        })
    }

    /// The same sequence under `t ↦ a t + b` with `a > 0`.
    pub fn affine(&self, a: &S, b: &S) -> Self {
        let map = |t: &S| a.clone() * t.clone() + b.clone();
        DefiningSequence {
            hull: (map(&self.hull.0), map(&self.hull.1)),
            removals: self
                .removals
                .iter()
                .map(|(l, r)| (map(l), map(r)))
                .collect(),
        }
    }

    /// First `n` removals.
    pub fn truncated(&self, n: usize) -> Self {
        DefiningSequence {
            hull: self.hull.clone(),
            removals: self.removals[..n.min(self.removals.len())].to_vec(),
        }
    }
}

/// Bridges of every removal, checking well-formedness along the way.
pub fn all_bridges<S: Scalar>(ds: &DefiningSequence<S>) -> Result<Vec<BridgePair<S>>> {
    let (h_lo, h_hi) = &ds.hull;
    if !h_lo.certainly_lt(h_hi) {
        return Err(Error::MalformedSequence("hull has no interior".into()));
    }
    let gaps = &ds.removals;
    let mut order: Vec<usize> = (0..gaps.len()).collect();
    order.sort_by(|&i, &j| gaps[i].0.cmp_center(&gaps[j].0));
    let mut rank = vec![0; gaps.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }

    let mut removed: BTreeSet<usize> = BTreeSet::new();
    let mut out = Vec::with_capacity(gaps.len());
    for (n, (g_lo, g_hi)) in gaps.iter().enumerate() {
        let r = rank[n];
        let left_end = match removed.range(..r).next_back() {
            Some(&p) => gaps[order[p]].1.clone(),
            None => h_lo.clone(),
        };
        let right_end = match removed.range(r + 1..).next() {
            Some(&q) => gaps[order[q]].0.clone(),
            None => h_hi.clone(),
        };
        let interior =
            left_end.certainly_lt(g_lo) && g_lo.certainly_lt(g_hi) && g_hi.certainly_lt(&right_end);
        if !interior {
            return Err(Error::MalformedSequence(format!(
                "removal {} is not strictly inside its component",
                n + 1
            )));
        }
        removed.insert(r);
        out.push(BridgePair {
            left: (left_end, g_lo.clone()),
            right: (g_hi.clone(), right_end),
        });
    }
    Ok(out)
}

/// Bridges of the `n`-th removal (1-based).
pub fn bridges<S: Scalar>(ds: &DefiningSequence<S>, n: usize) -> Result<BridgePair<S>> {
    if n == 0 || n > ds.removals.len() {
        return Err(Error::InvalidInput(format!(
            "removal index {n} outside 1..={}",
            ds.removals.len()
        )));
    }
    Ok(all_bridges(&ds.truncated(n))?
        .pop()
        .expect("n >= 1 removals"))
}

/// `min(|L|/|V|, |R|/|V|)` for one removal.
pub fn bridge_ratio<S: Scalar>(gap: &(S, S), b: &BridgePair<S>) -> S {
    let v = gap.1.clone() - gap.0.clone();
    (b.left_len() / v.clone()).min_of(&(b.right_len() / v))
}

/// Thickness of the truncated defining sequence: the minimum bridge ratio
/// over the listed removals. Equals the thickness of the truncation when
/// removals are ordered by size.
pub fn thickness_of<S: Scalar>(ds: &DefiningSequence<S>) -> Result<S> {
    let bridges = all_bridges(ds)?;
    ds.removals
        .par_iter()
        .zip(bridges.par_iter())
        .map(|(g, b)| bridge_ratio(g, b))
        .reduce_with(|a, b| a.min_of(&b))
        .ok_or_else(|| Error::MalformedSequence("no removals".into()))
}

/// `log 2 / log(2 + 1/τ)`, a lower bound for the Hausdorff dimension of a
/// set of thickness `τ`.
pub fn newhouse_lower<F: num_traits::Float>(tau: F) -> Result<F> {
    if tau.is_nan() || tau <= F::zero() {
        return Err(Error::NonpositiveThickness);
    }
    let two = F::one() + F::one();
    Ok(two.ln() / (two + tau.recip()).ln())
}

/// Neither set lies in a gap of the other, nor outside its hull. Only
/// returns `true` when certified at the given truncations.
pub fn interleaved<S: Scalar>(e: &DefiningSequence<S>, f: &DefiningSequence<S>) -> bool {
    not_inside(&f.hull, e) && not_inside(&e.hull, f)
}

/// `hull` certainly meets `ds.hull` and is not inside any listed gap.
fn not_inside<S: Scalar>(hull: &(S, S), ds: &DefiningSequence<S>) -> bool {
    let (a, b) = hull;
    let meets = ds.hull.0.certainly_le(b) && a.certainly_le(&ds.hull.1);
    meets
        && ds
            .removals
            .iter()
            .all(|(g_lo, g_hi)| a.certainly_le(g_lo) || g_hi.certainly_le(b))
}

/// The middle-`α` Cantor set on `[0, 1]`: every interval loses its central
/// open `α` fraction. Gaps are listed level by level, left to right, for
/// `levels` levels.
pub fn middle_alpha(alpha: &Rational, levels: u32) -> DefiningSequence<Rational> {
    use num_traits::{One, Zero};
    assert!(
        *alpha > Rational::zero() && *alpha < Rational::one(),
        "α must lie in (0, 1)"
    );
    let two = Rational::from_integer(2.into());
    let side = (Rational::one() - alpha) / &two;
    let mut intervals = vec![(Rational::zero(), Rational::one())];
    let mut removals = Vec::new();
    for _ in 0..levels {
        let mut next = Vec::with_capacity(intervals.len() * 2);
        for (lo, hi) in intervals {
            let len = &hi - &lo;
            let g_lo = &lo + &side * &len;
            let g_hi = &hi - &side * &len;
            removals.push((g_lo.clone(), g_hi.clone()));
            next.push((lo, g_lo));
            next.push((g_hi, hi));
        }
        intervals = next;
    }
    DefiningSequence::new((Rational::zero(), Rational::one()), removals)
}
