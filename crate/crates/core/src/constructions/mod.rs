//! Explicit Cantor subsets of `Λ(x)`.
//!
//! With `(x_n)` the binary expansion of `x` and `n_1 < n_2 < …` its zero
//! indices counted from `n = 2`, write `P_k = x_1 … x_{n_k - 1}`. The piece
//! `F_k = Ψ_x^{-1}[P_k 1 0^inf, P_k 1^inf]` has hull `[α_k, β_k]` and gaps
//! `V_{k,ω}` between `P_k 1 ω 1 0^inf` and `P_k 1 ω 0 1^inf`. The set
//! `C_ℓ = {1/2} ∪ ⋃_{k≥ℓ} F_k` has hull `[α_ℓ, 1/2]`.

mod verify;

pub use verify::{
    verify_case_a, verify_case_b, Bound, Case, Instance, Relation, Shape, Status,
    VerificationLedger,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::cantor_metrics::{all_bridges, bridge_ratio, DefiningSequence};
use crate::error::{Error, Result};
use crate::lambda_set::Target;
use crate::numerics::{half, Dyadic, Enclosure, PrecisionConfig};
use crate::scalar::Scalar;
use crate::seqcode::{kth_zero_index, n_index, word_at_index, EpSequence, Word};
use crate::Rational;

/// Zero indices are counted among `n >= 2`; recorded in every report.
pub const ZERO_INDEX_CONVENTION: &str = "zero indices n_k counted from n = 2";

/// Hull of the piece `F_k` and the left end of the next piece.
#[derive(Clone, Debug, Serialize)]
pub struct PieceEndpoints {
    #[serde(with = "crate::numerics::rational_str")]
    pub x: Rational,
    pub k: usize,
    pub n_k: usize,
    pub alpha: Enclosure,
    pub beta: Enclosure,
    /// `α_{k+1} = Ψ_x^{-1}(P_k 0 1^inf)`.
    pub alpha_next: Enclosure,
}

/// One gap `V_{k,ω}` with its bridges in `𝒱_k`.
#[derive(Clone, Debug, Serialize)]
pub struct GapRecord {
    pub k: usize,
    pub omega: Word,
    /// `N(ω)`.
    pub position: u64,
    pub gap: (Enclosure, Enclosure),
    pub left_bridge: (Enclosure, Enclosure),
    pub right_bridge: (Enclosure, Enclosure),
    pub left_ratio_lo: Dyadic,
    pub right_ratio_lo: Dyadic,
}

impl GapRecord {
    pub fn gamma(&self) -> [&Enclosure; 4] {
        [
            &self.left_bridge.0,
            &self.gap.0,
            &self.gap.1,
            &self.right_bridge.1,
        ]
    }

    /// Certified lower bound for `min(|L|, |R|) / |V|`.
    pub fn ratio_lo(&self) -> Dyadic {
        std::cmp::min(&self.left_ratio_lo, &self.right_ratio_lo).clone()
    }
}

/// `(P_k, n_k)`.
pub fn piece_prefix(target: &Target, k: usize) -> Result<(Word, usize)> {
    if k == 0 {
        return Err(Error::InvalidInput("pieces are indexed from k = 1".into()));
    }
    let n_k = kth_zero_index(target.expansion(), k)?;
    Ok((target.expansion().prefix(n_k - 1), n_k))
}

/// Solves `α_k`, `β_k` and `α_{k+1}`.
pub fn piece_endpoints(x: &Rational, k: usize, cfg: &PrecisionConfig) -> Result<PieceEndpoints> {
    piece_endpoints_for(&Target::new(x)?, k, cfg)
}

pub(crate) fn piece_endpoints_for(
    target: &Target,
    k: usize,
    cfg: &PrecisionConfig,
) -> Result<PieceEndpoints> {
    let (p, n_k) = piece_prefix(target, k)?;
    let codings = [
        p.with(1).then_ones(),
        p.with(1).then_zeros(),
        p.with(0).then_ones(),
    ];
    let solved = codings
        .par_iter()
        .map(|s| target.psi_inverse(s, cfg))
        .collect::<Result<Vec<_>>>()?;
    let [alpha, beta, alpha_next]: [Enclosure; 3] = solved.try_into().expect("three codings");
    Ok(PieceEndpoints {
        x: target.x().clone(),
        k,
        n_k,
        alpha,
        beta,
        alpha_next,
    })
}

/// The four codings `P_k 1 ω 1^inf`, `P_k 1 ω 1 0^inf`, `P_k 1 ω 0 1^inf`,
/// `P_k 1 ω 0^inf` of `γ_1 < γ_2 < γ_3 < γ_4`.
pub fn gap_codings(prefix: &Word, omega: &Word) -> [EpSequence; 4] {
    let base = prefix.with(1).concat(omega);
    [
        base.then_ones(),
        base.with(1).then_zeros(),
        base.with(0).then_ones(),
        base.then_zeros(),
    ]
}

/// Gap `V_{k,ω}` with certified bridge ratios.
pub fn gap_record(
    x: &Rational,
    k: usize,
    omega: &Word,
    cfg: &PrecisionConfig,
) -> Result<GapRecord> {
    gap_record_for(&Target::new(x)?, k, omega, cfg)
}

pub(crate) fn gap_record_for(
    target: &Target,
    k: usize,
    omega: &Word,
    cfg: &PrecisionConfig,
) -> Result<GapRecord> {
    let (p, _) = piece_prefix(target, k)?;
    let g = gap_codings(&p, omega)
        .iter()
        .map(|s| target.psi_inverse(s, cfg))
        .collect::<Result<Vec<_>>>()?;
    let v = g[2].clone() - g[1].clone();
    let left = (g[1].clone() - g[0].clone()) / v.clone();
    let right = (g[3].clone() - g[2].clone()) / v;
    Ok(GapRecord {
        k,
        omega: omega.clone(),
        position: n_index(omega),
        gap: (g[1].clone(), g[2].clone()),
        left_bridge: (g[0].clone(), g[1].clone()),
        right_bridge: (g[2].clone(), g[3].clone()),
        left_ratio_lo: left.lo().clone(),
        right_ratio_lo: right.lo().clone(),
    })
}

/// Number of words of length at most `q_max`.
fn word_count(q_max: u32) -> u64 {
    (1u64 << (q_max + 1)) - 1
}

/// Gap `V_{k,j}` (`j = N(ω)`) as an enclosure pair.
fn piece_gap(
    target: &Target,
    prefix: &Word,
    j: u64,
    cfg: &PrecisionConfig,
) -> Result<(Enclosure, Enclosure)> {
    let [_, g2, g3, _] = gap_codings(prefix, &word_at_index(j));
    Ok((target.psi_inverse(&g2, cfg)?, target.psi_inverse(&g3, cfg)?))
}

/// `𝒱_k` truncated to `|ω| <= q_max`, in `N(ω)` order.
pub fn defining_sequence_fk(
    x: &Rational,
    k: usize,
    q_max: u32,
    cfg: &PrecisionConfig,
) -> Result<DefiningSequence<Enclosure>> {
    let target = Target::new(x)?;
    let piece = piece_endpoints_for(&target, k, cfg)?;
    let (p, _) = piece_prefix(&target, k)?;
    let removals = (1..=word_count(q_max))
        .into_par_iter()
        .map(|j| piece_gap(&target, &p, j, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(DefiningSequence::new((piece.alpha, piece.beta), removals))
}

/// A removal of `𝒲_ℓ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Removal {
    /// `(β_k, α_{k+1})`.
    Between { k: usize },
    /// `V_{k,j}`.
    PieceGap { k: usize, j: u64 },
}

/// The diagonal enumeration of `𝒲_ℓ`: row 0 holds `(β_{ℓ+c}, α_{ℓ+c+1})`,
/// row `r >= 1` holds `V_{ℓ+r-1, c+1}`, and diagonal `d = r + c` is read
/// from `r = d` down to `r = 0`. Truncated to `k < ℓ + k_max` and
/// `j < 2^(q_max+1)`.
pub fn cl_removal_order(ell: usize, k_max: usize, q_max: u32) -> Vec<Removal> {
    let j_max = word_count(q_max) as usize;
    let mut out = Vec::with_capacity(k_max * (j_max + 1));
    for d in 0..(k_max + j_max) {
        for r in (0..=d).rev() {
            let c = d - r;
            if r == 0 {
                if c < k_max {
                    out.push(Removal::Between { k: ell + c });
                }
            } else if r - 1 < k_max && c < j_max {
                out.push(Removal::PieceGap {
                    k: ell + r - 1,
                    j: c as u64 + 1,
                });
            }
        }
    }
    out
}

/// Pieces `ℓ .. ℓ + k_max - 1` of `C_ℓ`, solved in parallel.
fn solve_pieces(
    target: &Target,
    ell: usize,
    k_max: usize,
    cfg: &PrecisionConfig,
) -> Result<Vec<PieceEndpoints>> {
    if ell == 0 || k_max == 0 {
        return Err(Error::InvalidInput("need ℓ >= 1 and k_max >= 1".into()));
    }
    (ell..ell + k_max)
        .into_par_iter()
        .map(|k| piece_endpoints_for(target, k, cfg))
        .collect()
}

struct ClData {
    pieces: Vec<PieceEndpoints>,
    order: Vec<Removal>,
    ds: DefiningSequence<Enclosure>,
}

fn build_cl(
    x: &Rational,
    ell: usize,
    k_max: usize,
    q_max: u32,
    cfg: &PrecisionConfig,
) -> Result<ClData> {
    let target = Target::new(x)?;
    let pieces = solve_pieces(&target, ell, k_max, cfg)?;
    let order = cl_removal_order(ell, k_max, q_max);
    let prefixes = (ell..ell + k_max)
        .map(|k| piece_prefix(&target, k).map(|(p, _)| p))
        .collect::<Result<Vec<_>>>()?;
    let removals = order
        .par_iter()
        .map(|r| match *r {
            Removal::Between { k } => {
                let p = &pieces[k - ell];
                Ok((p.beta.clone(), p.alpha_next.clone()))
            }
            Removal::PieceGap { k, j } => piece_gap(&target, &prefixes[k - ell], j, cfg),
        })
        .collect::<Result<Vec<_>>>()?;
    let hull = (pieces[0].alpha.clone(), cfg.enclose(&half()));
    Ok(ClData {
        pieces,
        order,
        ds: DefiningSequence::new(hull, removals),
    })
}

/// `𝒲_ℓ` truncated to `k_max` pieces and `|ω| <= q_max`.
pub fn defining_sequence_cl(
    x: &Rational,
    ell: usize,
    k_max: usize,
    q_max: u32,
    cfg: &PrecisionConfig,
) -> Result<DefiningSequence<Enclosure>> {
    Ok(build_cl(x, ell, k_max, q_max, cfg)?.ds)
}

/// Per-piece quantities entering the thickness of `C_ℓ`.
#[derive(Clone, Debug, Serialize)]
pub struct PieceSummary {
    pub k: usize,
    pub n_k: usize,
    pub alpha: Enclosure,
    pub beta: Enclosure,
    pub alpha_next: Enclosure,
    /// Truncated thickness of `𝒱_k`.
    pub piece_thickness: Enclosure,
    /// `(β_k - α_k) / (α_{k+1} - β_k)`.
    pub piece_to_gap: Enclosure,
    /// `(1/2 - α_{k+1}) / (α_{k+1} - β_k)`.
    pub tail_to_gap: Enclosure,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyMinima {
    pub piece_ratios: Enclosure,
    pub bridge_f: Enclosure,
    pub bridge_half: Enclosure,
}

/// An analytic lower bound that the computed ratio failed to certify.
#[derive(Clone, Debug, Serialize)]
pub struct BoundViolation {
    pub bound: Bound,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<u64>,
    pub value: Enclosure,
    pub lower_bound: Enclosure,
    pub status: Status,
}

/// Truncated thickness of `C_ℓ` under `𝒲_ℓ`.
#[derive(Clone, Debug, Serialize)]
pub struct ThicknessReport {
    #[serde(with = "crate::numerics::rational_str")]
    pub x: Rational,
    pub ell: usize,
    pub k_max: usize,
    pub q_max: u32,
    pub convention: &'static str,
    /// Certified lower bound of the truncated thickness.
    pub tau_truncated: Dyadic,
    pub tau: Enclosure,
    pub per_family_minima: FamilyMinima,
    pub pieces: Vec<PieceSummary>,
    /// Number of `(k, j)` gap ratios checked against the analytic bounds.
    pub bounds_checked: usize,
    pub bound_violations: Vec<BoundViolation>,
}

/// Thickness of `C_ℓ` from the three families, with every computed ratio
/// checked against the matching analytic bound (where it applies).
pub fn thickness_cl(
    x: &Rational,
    ell: usize,
    k_max: usize,
    q_max: u32,
    cfg: &PrecisionConfig,
) -> Result<ThicknessReport> {
    let data = build_cl(x, ell, k_max, q_max, cfg)?;
    let bridges = all_bridges(&data.ds)?;
    let half_e = cfg.enclose(&half());
    let bounds = verify::BoundSet::for_target(&Target::new(x)?)?;

    let mut piece_min: Vec<Option<Enclosure>> = vec![None; k_max];
    let mut checked = 0;
    let mut violations = Vec::new();
    for ((removal, gap), b) in data.order.iter().zip(&data.ds.removals).zip(&bridges) {
        if let Removal::PieceGap { k, j } = *removal {
            let ratio = bridge_ratio(gap, b);
            let piece = &data.pieces[k - ell];
            if let Some(bound) = bounds.piece_thickness(piece) {
                checked += 1;
                let status = Relation::Ge.check(&ratio, &bound);
                if status != Status::Pass {
                    violations.push(BoundViolation {
                        bound: Bound::PieceThickness,
                        k,
                        j: Some(j),
                        value: ratio.clone(),
                        lower_bound: bound,
                        status,
                    });
                }
            }
            let slot = &mut piece_min[k - ell];
            *slot = Some(match slot.take() {
                Some(m) => m.min_of(&ratio),
                None => ratio,
            });
        }
    }

    let mut pieces = Vec::with_capacity(k_max);
    for (p, tau_k) in data.pieces.iter().zip(piece_min) {
        let between = p.alpha_next.clone() - p.beta.clone();
        let piece_to_gap = (p.beta.clone() - p.alpha.clone()) / between.clone();
        let tail_to_gap = (half_e.clone() - p.alpha_next.clone()) / between;
        for (bound, value, lower) in [
            (Bound::PieceToGap, &piece_to_gap, bounds.piece_to_gap(p)),
            (Bound::TailToGap, &tail_to_gap, bounds.tail_to_gap(p)),
        ] {
            if let Some(lower) = lower {
                checked += 1;
                let status = Relation::Ge.check(value, &lower);
                if status != Status::Pass {
                    violations.push(BoundViolation {
                        bound,
                        k: p.k,
                        j: None,
                        value: value.clone(),
                        lower_bound: lower,
                        status,
                    });
                }
            }
        }
        pieces.push(PieceSummary {
            k: p.k,
            n_k: p.n_k,
            alpha: p.alpha.clone(),
            beta: p.beta.clone(),
            alpha_next: p.alpha_next.clone(),
            piece_thickness: tau_k.expect("every piece has at least V_{k,1}"),
            piece_to_gap,
            tail_to_gap,
        });
    }

    let fold = |f: &dyn Fn(&PieceSummary) -> &Enclosure| {
        pieces
            .iter()
            .map(f)
            .cloned()
            .reduce(|a, b| a.min_of(&b))
            .expect("k_max >= 1")
    };
    let minima = FamilyMinima {
        piece_ratios: fold(&|p| &p.piece_thickness),
        bridge_f: fold(&|p| &p.piece_to_gap),
        bridge_half: fold(&|p| &p.tail_to_gap),
    };
    let tau = minima
        .piece_ratios
        .min_of(&minima.bridge_f)
        .min_of(&minima.bridge_half);
    Ok(ThicknessReport {
        x: x.clone(),
        ell,
        k_max,
        q_max,
        convention: ZERO_INDEX_CONVENTION,
        tau_truncated: if tau.lo().signum() > 0 {
            tau.lo().clone()
        } else {
            Dyadic::zero()
        },
        tau,
        per_family_minima: minima,
        pieces,
        bounds_checked: checked,
        bound_violations: violations,
    })
}

impl ThicknessReport {
    pub fn is_clean(&self) -> bool {
        self.bound_violations.is_empty()
    }
}
