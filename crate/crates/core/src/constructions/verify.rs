//! Certified checks of the per-gap estimates behind the divergence of the
//! thickness of `C_ℓ`.
//!
//! Case A is every `x ≠ 1/4`; it uses `m`, the least index `>= 3` with
//! `x_m = 1`. Case B is `x = 1/4`, whose expansion `010^inf` has no such
//! index. An instance passes only when the inequality is certified by the
//! enclosures; undecided instances count as violations.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    gap_codings, piece_endpoints_for, piece_prefix, PieceEndpoints, ZERO_INDEX_CONVENTION,
};
use crate::error::{Error, Result};
use crate::lambda_set::Target;
use crate::numerics::{half, ratio, Dyadic, Enclosure, PrecisionConfig};
use crate::scalar::Scalar;
use crate::seqcode::{EpSequence, Word};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Case {
    A,
    B,
}

/// Which estimate an instance checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// `λ2 - λ1` for codings `u 1^inf`, `u 0^inf` is bounded below.
    SeparationLower,
    /// `λ4 - λ3` for codings `u 1 0^inf`, `u 0 1^inf`, bound in `λ3` only.
    GapUpperNear,
    /// The same gap, bound through `λ4` (Case A only).
    GapUpperFar,
    /// Bridge-to-gap ratios inside a piece.
    PieceThickness,
    /// `(β_k - α_k) / (α_{k+1} - β_k)`.
    PieceToGap,
    /// `(1/2 - α_{k+1}) / (α_{k+1} - β_k)`.
    TailToGap,
    /// Case A: the tail ratio exceeds `x^(m-2) 2^(n_k-3)`.
    TailToGapCrude,
    /// Case B: `(1/2 - α_{k+1})^2 = α_{k+1}^(n_k)`.
    TailIdentity,
}

/// Shapes also used as labels for analytic bounds in thickness reports.
pub type Bound = Shape;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Ge,
    Gt,
    Le,
    /// `|lhs - rhs| <= 2^-k`.
    ResidualAtMost(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Undecided,
}

impl Relation {
    pub fn check(&self, lhs: &Enclosure, rhs: &Enclosure) -> Status {
        let (pass, fail) = match self {
            Relation::Ge => (lhs.lo() >= rhs.hi(), lhs.hi() < rhs.lo()),
            Relation::Gt => (lhs.lo() > rhs.hi(), lhs.hi() <= rhs.lo()),
            Relation::Le => (lhs.hi() <= rhs.lo(), lhs.lo() > rhs.hi()),
            Relation::ResidualAtMost(k) => {
                let diff = lhs.clone() - rhs.clone();
                let tol = Dyadic::pow2(-(*k as i64));
                let worst = std::cmp::max(diff.lo().abs(), diff.hi().abs());
                let best = if diff.contains_zero() {
                    Dyadic::zero()
                } else {
                    std::cmp::min(diff.lo().abs(), diff.hi().abs())
                };
                (worst <= tol, best > tol)
            }
        };
        if pass {
            Status::Pass
        } else if fail {
            Status::Fail
        } else {
            Status::Undecided
        }
    }
}

/// One checked inequality `lhs (relation) rhs`.
#[derive(Clone, Debug, Serialize)]
pub struct Instance {
    pub shape: Shape,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<Word>,
    pub codings: Vec<EpSequence>,
    pub lhs: Enclosure,
    pub relation: Relation,
    pub rhs: Enclosure,
    pub status: Status,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationLedger {
    pub case: Case,
    #[serde(with = "crate::numerics::rational_str")]
    pub x: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub seed: u64,
    pub trials: usize,
    pub convention: &'static str,
    pub passed: usize,
    pub violations: usize,
    pub instances: Vec<Instance>,
}

impl VerificationLedger {
    fn new(
        case: Case,
        x: Rational,
        m: Option<usize>,
        seed: u64,
        trials: usize,
        instances: Vec<Instance>,
    ) -> Self {
        let passed = instances
            .iter()
            .filter(|i| i.status == Status::Pass)
            .count();
        VerificationLedger {
            case,
            x,
            m,
            seed,
            trials,
            convention: ZERO_INDEX_CONVENTION,
            passed,
            violations: instances.len() - passed,
            instances,
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violations == 0
    }

    pub fn count(&self, shape: Shape) -> usize {
        self.instances.iter().filter(|i| i.shape == shape).count()
    }
}

/// Least `m >= 3` with `x_m = 1`.
pub(crate) fn case_a_index(target: &Target) -> Option<usize> {
    let s = target.expansion();
    let horizon = s.preperiod().len() + s.period().len() + 3;
    (3..=horizon).find(|&n| s.digit(n) == 1)
}

fn enc_int(n: i64, like: &Enclosure) -> Enclosure {
    Enclosure::from_int(n, like.bits())
}

/// The analytic lower bounds for one target.
pub(crate) struct BoundSet {
    case: Case,
    m: usize,
    x: Rational,
}

impl BoundSet {
    pub(crate) fn for_target(target: &Target) -> Result<Self> {
        Ok(match case_a_index(target) {
            Some(m) => BoundSet {
                case: Case::A,
                m,
                x: target.x().clone(),
            },
            None => BoundSet {
                case: Case::B,
                m: 0,
                x: target.x().clone(),
            },
        })
    }

    /// Case A bounds need `n_k > m`.
    fn applies(&self, p: &PieceEndpoints) -> bool {
        self.case == Case::B || p.n_k > self.m
    }

    /// `1 - 2α_k + n_k 2^(3 - n_k)`.
    fn case_b_denominator(p: &PieceEndpoints) -> Enclosure {
        let a = &p.alpha;
        let n = p.n_k as i64;
        enc_int(1, a) - enc_int(2, a) * a.clone()
            + enc_int(n, a) * Enclosure::point(Dyadic::pow2(3 - n), a.bits())
    }

    pub(crate) fn piece_thickness(&self, p: &PieceEndpoints) -> Option<Enclosure> {
        if !self.applies(p) {
            return None;
        }
        let a = &p.alpha;
        Some(match self.case {
            Case::A => {
                a.pow(self.m as u32 - 1)
                    / (enc_int(8, a) * (enc_int(1, a) - enc_int(2, a) * a.clone()))
            }
            Case::B => a.clone() / Self::case_b_denominator(p),
        })
    }

    pub(crate) fn piece_to_gap(&self, p: &PieceEndpoints) -> Option<Enclosure> {
        if !self.applies(p) {
            return None;
        }
        let b = &p.beta;
        Some(match self.case {
            Case::A => {
                b.pow(self.m as u32 - 1)
                    / (enc_int(8, b) * (enc_int(1, b) - enc_int(2, b) * b.clone()))
            }
            Case::B => b.clone() / Self::case_b_denominator(p),
        })
    }

    pub(crate) fn tail_to_gap(&self, p: &PieceEndpoints) -> Option<Enclosure> {
        if !self.applies(p) {
            return None;
        }
        let a1 = &p.alpha_next;
        Some(match self.case {
            Case::A => p.beta.pow(self.m as u32 - 2) / (enc_int(4, a1) * a1.pow(p.n_k as u32 - 1)),
            // 1 / α_{k+1}^(n_k/2 - 1)
            Case::B => enc_int(1, a1) / a1.sqrt().pow(p.n_k as u32 - 2),
        })
    }

    /// Case A: `x^(m-2) / (4 · 2^(1-n_k))`.
    fn tail_to_gap_crude(&self, p: &PieceEndpoints, bits: u32) -> Enclosure {
        Enclosure::from_rational(&self.x, bits).pow(self.m as u32 - 2)
            * Enclosure::point(Dyadic::pow2(p.n_k as i64 - 3), bits)
    }
}

enum Draw {
    /// Codings `u 1^inf` and `u 0^inf`; `zeros` is the Case B run length.
    Separation {
        u: Word,
        q: usize,
        zeros: usize,
    },
    /// Codings `u j 1 0^inf` and `u j 0 1^inf` with `|j| = q`.
    Gap {
        u: Word,
        q: usize,
    },
    PieceGap {
        k: usize,
        omega: Word,
    },
    Piece {
        k: usize,
    },
    Identity {
        k: usize,
    },
}

struct Ctx<'a> {
    target: &'a Target,
    bounds: &'a BoundSet,
    pieces: &'a BTreeMap<usize, PieceEndpoints>,
    cfg: &'a PrecisionConfig,
}

fn instance(
    shape: Shape,
    codings: Vec<EpSequence>,
    lhs: Enclosure,
    relation: Relation,
    rhs: Enclosure,
) -> Instance {
    let status = relation.check(&lhs, &rhs);
    Instance {
        shape,
        k: None,
        n_k: None,
        q: None,
        omega: None,
        codings,
        lhs,
        relation,
        rhs,
        status,
    }
}

impl Ctx<'_> {
    fn solve(&self, s: &EpSequence) -> Result<Enclosure> {
        self.target.psi_inverse(s, self.cfg)
    }

    fn eval(&self, draw: &Draw) -> Result<Vec<Instance>> {
        let one = |e: &Enclosure| enc_int(1, e);
        let two = |e: &Enclosure| enc_int(2, e);
        match draw {
            Draw::Separation { u, q, zeros } => {
                let (s1, s2) = (u.then_ones(), u.then_zeros());
                let (l1, l2) = (self.solve(&s1)?, self.solve(&s2)?);
                let lhs = l2.clone() - l1.clone();
                let rhs = match self.bounds.case {
                    Case::A => l2.pow(*q as u32) / enc_int(4, &l2),
                    Case::B => {
                        let z = *zeros as i64;
                        let den = one(&l1) - two(&l1) * l1.clone()
                            + enc_int(z + 3, &l1) * Enclosure::point(Dyadic::pow2(-z), l1.bits());
                        l2.pow(u.len() as u32) / den
                    }
                };
                let mut i = instance(Shape::SeparationLower, vec![s1, s2], lhs, Relation::Ge, rhs);
                i.q = Some(*q);
                Ok(vec![i])
            }
            Draw::Gap { u, q } => {
                let (s3, s4) = (u.with(1).then_zeros(), u.with(0).then_ones());
                let (l3, l4) = (self.solve(&s3)?, self.solve(&s4)?);
                let lhs = l4.clone() - l3.clone();
                let codings = vec![s3, s4];
                let q32 = *q as u32;
                let mut out = match self.bounds.case {
                    Case::A => {
                        let m = self.bounds.m as u32;
                        let near = two(&l3) * (one(&l3) - two(&l3) * l3.clone()) * l3.pow(q32 + 2);
                        let far = two(&l4) * (one(&l4) - two(&l4) * l4.clone()) * l4.pow(m + q32)
                            / l3.pow(m - 2);
                        vec![
                            instance(
                                Shape::GapUpperNear,
                                codings.clone(),
                                lhs.clone(),
                                Relation::Le,
                                near,
                            ),
                            instance(Shape::GapUpperFar, codings, lhs, Relation::Le, far),
                        ]
                    }
                    Case::B => vec![instance(
                        Shape::GapUpperNear,
                        codings,
                        lhs,
                        Relation::Le,
                        l3.pow(2 + q32),
                    )],
                };
                for i in &mut out {
                    i.q = Some(*q);
                }
                Ok(out)
            }
            Draw::PieceGap { k, omega } => {
                let p = &self.pieces[k];
                let (prefix, _) = piece_prefix(self.target, *k)?;
                let codings = gap_codings(&prefix, omega);
                let g = codings
                    .iter()
                    .map(|s| self.solve(s))
                    .collect::<Result<Vec<_>>>()?;
                let v = g[2].clone() - g[1].clone();
                let left = (g[1].clone() - g[0].clone()) / v.clone();
                let right = (g[3].clone() - g[2].clone()) / v;
                let bound = self
                    .bounds
                    .piece_thickness(p)
                    .expect("piece range is chosen where the bound applies");
                let mut i = instance(
                    Shape::PieceThickness,
                    codings.to_vec(),
                    left.min_of(&right),
                    Relation::Ge,
                    bound,
                );
                i.k = Some(*k);
                i.n_k = Some(p.n_k);
                i.omega = Some(omega.clone());
                Ok(vec![i])
            }
            Draw::Piece { k } => {
                let p = &self.pieces[k];
                let between = p.alpha_next.clone() - p.beta.clone();
                let piece_to_gap = (p.beta.clone() - p.alpha.clone()) / between.clone();
                let tail = self.cfg.enclose(&half()) - p.alpha_next.clone();
                let tail_to_gap = tail / between;
                let mut out = vec![
                    instance(
                        Shape::PieceToGap,
                        vec![],
                        piece_to_gap,
                        Relation::Ge,
                        self.bounds.piece_to_gap(p).expect("bound applies"),
                    ),
                    instance(
                        Shape::TailToGap,
                        vec![],
                        tail_to_gap.clone(),
                        Relation::Ge,
                        self.bounds.tail_to_gap(p).expect("bound applies"),
                    ),
                ];
                if self.bounds.case == Case::A {
                    out.push(instance(
                        Shape::TailToGapCrude,
                        vec![],
                        tail_to_gap,
                        Relation::Gt,
                        self.bounds.tail_to_gap_crude(p, self.cfg.precision_bits),
                    ));
                }
                for i in &mut out {
                    i.k = Some(*k);
                    i.n_k = Some(p.n_k);
                }
                Ok(out)
            }
            Draw::Identity { k } => {
                let p = &self.pieces[k];
                let a1 = &p.alpha_next;
                let lhs = (self.cfg.enclose(&half()) - a1.clone()).pow(2);
                let mut i = instance(
                    Shape::TailIdentity,
                    vec![],
                    lhs,
                    Relation::ResidualAtMost(70),
                    a1.pow(p.n_k as u32),
                );
                i.k = Some(*k);
                i.n_k = Some(p.n_k);
                Ok(vec![i])
            }
        }
    }
}

fn random_word<R: Rng>(rng: &mut R, len: usize) -> Word {
    Word::new((0..len).map(|_| rng.gen_range(0..=1)).collect()).expect("binary digits")
}

fn run(
    target: &Target,
    bounds: &BoundSet,
    draws: Vec<Draw>,
    cfg: &PrecisionConfig,
) -> Result<Vec<Instance>> {
    let mut ks: Vec<usize> = draws
        .iter()
        .filter_map(|s| match s {
            Draw::PieceGap { k, .. } | Draw::Piece { k } | Draw::Identity { k } => Some(*k),
            _ => None,
        })
        .collect();
    ks.sort_unstable();
    ks.dedup();
    let pieces: BTreeMap<usize, PieceEndpoints> = ks
        .par_iter()
        .map(|&k| piece_endpoints_for(target, k, cfg).map(|p| (k, p)))
        .collect::<Result<_>>()?;
    let ctx = Ctx {
        target,
        bounds,
        pieces: &pieces,
        cfg,
    };
    let nested = draws
        .par_iter()
        .map(|s| ctx.eval(s))
        .collect::<Result<Vec<_>>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// Pieces checked: the first `SPAN` indices where the bounds apply.
const SPAN: usize = 6;

/// Random instances of every Case A shape, `trials` of each.
pub fn verify_case_a(
    x: &Rational,
    trials: usize,
    seed: u64,
    cfg: &PrecisionConfig,
) -> Result<VerificationLedger> {
    let target = Target::new(x)?;
    let bounds = BoundSet::for_target(&target)?;
    if bounds.case != Case::A {
        return Err(Error::HypothesisUnsatisfiable(format!(
            "the expansion of {x} has no digit 1 at an index >= 3"
        )));
    }
    let m = bounds.m;
    let head = target.expansion().prefix(m);
    let mut k0 = 1;
    while piece_prefix(&target, k0)?.1 <= m {
        k0 += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(4 * trials);
    for _ in 0..trials {
        // u = 0 w, with u 0^inf admissible.
        let (u, q) = loop {
            let q = rng.gen_range(1..=10);
            let u = Word::repeat(0, 1).concat(&random_word(&mut rng, q - 1));
            if target.is_admissible(&u.then_zeros()) {
                break (u, q);
            }
        };
        draws.push(Draw::Separation { u, q, zeros: 0 });
    }
    for _ in 0..trials {
        let (u, q) = loop {
            let q = rng.gen_range(0..=8);
            let u = head.concat(&random_word(&mut rng, q));
            if target.is_admissible(&u.with(0).then_ones())
                && target.is_admissible(&u.with(1).then_zeros())
            {
                break (u, q);
            }
        };
        draws.push(Draw::Gap { u, q });
    }
    for _ in 0..trials {
        let k = rng.gen_range(k0..k0 + SPAN);
        let len = rng.gen_range(0..=5);
        draws.push(Draw::PieceGap {
            k,
            omega: random_word(&mut rng, len),
        });
    }
    for _ in 0..trials {
        draws.push(Draw::Piece {
            k: rng.gen_range(k0..k0 + SPAN),
        });
    }
    let instances = run(&target, &bounds, draws, cfg)?;
    Ok(VerificationLedger::new(
        Case::A,
        x.clone(),
        Some(m),
        seed,
        trials,
        instances,
    ))
}

/// Random instances of every Case B shape (`x = 1/4`), `trials` of each,
/// plus the tail identity for `k = 1..=6`.
pub fn verify_case_b(
    trials: usize,
    seed: u64,
    cfg: &PrecisionConfig,
) -> Result<VerificationLedger> {
    let x = ratio(1, 4);
    let target = Target::new(&x)?;
    let bounds = BoundSet::for_target(&target)?;
    debug_assert_eq!(bounds.case, Case::B);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(4 * trials + 6);
    for _ in 0..trials {
        let zeros = rng.gen_range(0..=6);
        let q = rng.gen_range(0..=8);
        let u = Word::new(vec![0, 1])?
            .concat(&Word::repeat(0, zeros))
            .concat(&random_word(&mut rng, q));
        draws.push(Draw::Separation { u, q, zeros });
    }
    for _ in 0..trials {
        let q = rng.gen_range(0..=8);
        let u = Word::new(vec![0, 1])?.concat(&random_word(&mut rng, q));
        draws.push(Draw::Gap { u, q });
    }
    for _ in 0..trials {
        let k = rng.gen_range(1..=2 + SPAN);
        let len = rng.gen_range(0..=5);
        draws.push(Draw::PieceGap {
            k,
            omega: random_word(&mut rng, len),
        });
    }
    for _ in 0..trials {
        draws.push(Draw::Piece {
            k: rng.gen_range(1..=2 + SPAN),
        });
    }
    draws.extend((1..=6).map(|k| Draw::Identity { k }));
    let instances = run(&target, &bounds, draws, cfg)?;
    Ok(VerificationLedger::new(
        Case::B,
        x,
        None,
        seed,
        trials,
        instances,
    ))
}
