use anyhow::{anyhow, bail, Context, Result};
use lambdaset::cantor_metrics::{
    all_bridges, bridge_ratio, newhouse_lower, thickness_of, DefiningSequence,
};
use lambdaset::constructions::{defining_sequence_cl, piece_endpoints, thickness_cl};
use lambdaset::constructions::{verify_case_a, verify_case_b};
use lambdaset::ifs::{greedy_digits, pi_eval};
use lambdaset::intersect::{find_common_with, intersect_covers, CommonSearch};
use lambdaset::lambda_set::{
    binary_expansion, box_dim_estimate, cover, cover_gaps, reduce_symmetric,
};
use lambdaset::numerics::parse_rational;
use lambdaset::{Enclosure, EpSequence, PrecisionConfig, Rational};
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{CaseArg, Command};
use crate::svg;

pub enum Payload {
    Json(Value),
    Svg(String),
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub struct Outcome {
    pub payload: Payload,
    pub table: Option<Table>,
    /// Bound violations or a failed ledger.
    pub failed: bool,
    pub notes: Vec<String>,
}

impl Outcome {
    fn json<T: Serialize>(value: &T) -> Result<Self> {
        Ok(Outcome {
            payload: Payload::Json(serde_json::to_value(value)?),
            table: None,
            failed: false,
            notes: vec![],
        })
    }

    fn with_table(mut self, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        self.table = Some(Table { header, rows });
        self
    }
}

fn rat(name: &str, s: &str) -> Result<Rational> {
    parse_rational(s).with_context(|| format!("--{name} {s:?}"))
}

/// Parses x, reducing `x ∈ (1/2, 1)` to `1 - x`.
fn target(s: &str, notes: &mut Vec<String>) -> Result<Rational> {
    let x = rat("x", s)?;
    let (y, flipped) = reduce_symmetric(&x);
    if flipped {
        notes.push(format!("x = {x} reduced to {y} by the symmetry x -> 1 - x"));
    }
    Ok(y)
}

fn targets(s: &str) -> Result<Vec<Rational>> {
    s.split(',')
        .map(|t| rat("targets", t.trim()))
        .collect::<Result<Vec<_>>>()
}

fn enc_cells(e: &Enclosure) -> [String; 2] {
    [e.lo().to_decimal_string(), e.hi().to_decimal_string()]
}

fn scales(s: &str) -> Result<Vec<u32>> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("--scales expects a:b"))?;
    let (a, b): (u32, u32) = (a.trim().parse()?, b.trim().parse()?);
    if a >= b {
        bail!("--scales needs a < b");
    }
    Ok((a..=b).collect())
}

/// Reads `{"hull":[lo,hi],"gaps":[[lo,hi],...]}`; numbers may be JSON
/// numbers or strings, and are parsed exactly.
pub fn parse_defining_sequence(text: &str) -> Result<DefiningSequence<Rational>> {
    let v: Value = serde_json::from_str(text).context("defining sequence JSON")?;
    let num = |v: &Value| -> Result<Rational> {
        match v {
            Value::String(s) => Ok(parse_rational(s)?),
            Value::Number(n) => Ok(parse_rational(&n.to_string())?),
            other => bail!("expected a number, got {other}"),
        }
    };
    let pair = |v: &Value| -> Result<(Rational, Rational)> {
        match v.as_array().map(|a| a.as_slice()) {
            Some([a, b]) => Ok((num(a)?, num(b)?)),
            _ => bail!("expected [lo, hi], got {v}"),
        }
    };
    let hull = pair(v.get("hull").ok_or_else(|| anyhow!("missing \"hull\""))?)?;
    let gaps = v
        .get("gaps")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("missing \"gaps\" array"))?
        .iter()
        .map(pair)
        .collect::<Result<Vec<_>>>()?;
    Ok(DefiningSequence::new(hull, gaps))
}

pub fn run(cmd: &Command, cfg: &PrecisionConfig) -> Result<Outcome> {
    let mut notes = Vec::new();
    let mut out = match cmd {
        Command::Code {
            x,
            lambda,
            max_steps,
        } => {
            let r = greedy_digits(&rat("x", x)?, &rat("lambda", lambda)?, *max_steps)?;
            Outcome::json(&r)?
        }
        Command::Pi { seq, lambda } => {
            let s: EpSequence = seq.parse().with_context(|| format!("--seq {seq:?}"))?;
            let l = rat("lambda", lambda)?;
            let value = pi_eval(&s, &l);
            Outcome::json(&json!({
                "seq": s.to_string(),
                "lambda": l.to_string(),
                "value": value.to_string(),
            }))?
        }
        Command::Expansion { x } => {
            let x = rat("x", x)?;
            let e = binary_expansion(&x)?;
            Outcome::json(&json!({ "x": x.to_string(), "expansion": e.to_string() }))?
        }
        Command::Cover { x, depth } => {
            let x = target(x, &mut notes)?;
            let c = cover(&x, *depth, cfg)?;
            let rows = c
                .intervals
                .iter()
                .map(|i| {
                    let [a, _] = enc_cells(&i.lo);
                    let [_, b] = enc_cells(&i.hi);
                    vec![
                        a,
                        b,
                        i.lo_code
                            .as_ref()
                            .map(ToString::to_string)
                            .unwrap_or_default(),
                        i.hi_code
                            .as_ref()
                            .map(ToString::to_string)
                            .unwrap_or_default(),
                    ]
                })
                .collect();
            Outcome::json(&c)?.with_table(vec!["lo", "hi", "lo_code", "hi_code"], rows)
        }
        Command::Gaps { x, depth } => {
            let x = target(x, &mut notes)?;
            let g = cover_gaps(&cover(&x, *depth, cfg)?);
            let rows = g
                .iter()
                .map(|g| {
                    vec![
                        g.left_end.hi().to_decimal_string(),
                        g.right_end.lo().to_decimal_string(),
                    ]
                })
                .collect();
            Outcome::json(&g)?.with_table(vec!["left_end", "right_end"], rows)
        }
        Command::Dim {
            x,
            center,
            radius,
            scales: sc,
            max_depth,
        } => {
            let x = target(x, &mut notes)?;
            let (c, r) = (rat("center", center)?, rat("radius", radius)?);
            let (a, b) = (&c - &r, &c + &r);
            let rep = box_dim_estimate(&x, (&a, &b), &scales(sc)?, *max_depth, cfg)?;
            let rows = rep
                .points
                .iter()
                .map(|(j, n, d)| vec![j.to_string(), n.to_string(), d.to_string()])
                .collect();
            Outcome::json(&rep)?.with_table(vec!["j", "boxes", "depth"], rows)
        }
        Command::Pieces { x, k } => Outcome::json(&piece_endpoints(&rat("x", x)?, *k, cfg)?)?,
        Command::CantorDs { x, ell, kmax, qmax } => {
            let ds = defining_sequence_cl(&rat("x", x)?, *ell, *kmax, *qmax, cfg)?;
            let rows = ds
                .removals
                .iter()
                .map(|(a, b)| vec![a.lo().to_decimal_string(), b.hi().to_decimal_string()])
                .collect();
            Outcome::json(&ds)?.with_table(vec!["gap_lo", "gap_hi"], rows)
        }
        Command::Thickness { gaps } => {
            let text = match gaps.strip_prefix('@') {
                Some(path) => {
                    std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?
                }
                None => gaps.clone(),
            };
            let ds = parse_defining_sequence(&text)?;
            let tau = thickness_of(&ds)?;
            let bridges = all_bridges(&ds)?;
            let per_gap: Vec<Value> = ds
                .removals
                .iter()
                .zip(&bridges)
                .map(|(g, b)| {
                    json!({
                        "gap": [g.0.to_string(), g.1.to_string()],
                        "left": [b.left.0.to_string(), b.left.1.to_string()],
                        "right": [b.right.0.to_string(), b.right.1.to_string()],
                        "ratio": bridge_ratio(g, b).to_string(),
                    })
                })
                .collect();
            let rows = per_gap
                .iter()
                .map(|v| {
                    vec![
                        v["gap"][0].as_str().unwrap_or_default().to_string(),
                        v["gap"][1].as_str().unwrap_or_default().to_string(),
                        v["ratio"].as_str().unwrap_or_default().to_string(),
                    ]
                })
                .collect();
            let tau_f = tau.to_f64().unwrap_or(f64::NAN);
            Outcome::json(&json!({
                "removals": ds.removals.len(),
                "ordered": ds.is_ordered(),
                "thickness": tau.to_string(),
                "thickness_f64": tau_f,
                "newhouse_lower": newhouse_lower(tau_f).ok(),
                "per_gap": per_gap,
            }))?
            .with_table(vec!["gap_lo", "gap_hi", "ratio"], rows)
        }
        Command::ThicknessCl { x, ell, kmax, qmax } => {
            let rep = thickness_cl(&rat("x", x)?, *ell, *kmax, *qmax, cfg)?;
            let failed = !rep.is_clean();
            let rows = rep
                .pieces
                .iter()
                .map(|p| {
                    vec![
                        p.k.to_string(),
                        p.n_k.to_string(),
                        p.piece_thickness.lo().to_f64().to_string(),
                        p.piece_to_gap.lo().to_f64().to_string(),
                        p.tail_to_gap.lo().to_f64().to_string(),
                    ]
                })
                .collect();
            let mut o = Outcome::json(&rep)?.with_table(
                vec!["k", "n_k", "piece_thickness", "piece_to_gap", "tail_to_gap"],
                rows,
            );
            o.failed = failed;
            o
        }
        Command::Verify {
            case,
            x,
            trials,
            seed,
        } => {
            let ledger = match case {
                CaseArg::A => {
                    let x = rat("x", x.as_deref().unwrap_or("1/3"))?;
                    verify_case_a(&x, *trials, *seed, cfg)?
                }
                CaseArg::B => {
                    if let Some(x) = x {
                        if rat("x", x)? != Rational::new(1.into(), 4.into()) {
                            bail!("Case B is the target x = 1/4");
                        }
                    }
                    verify_case_b(*trials, *seed, cfg)?
                }
            };
            let rows = ledger
                .instances
                .iter()
                .map(|i| {
                    let s = serde_json::to_value(i.shape).unwrap_or_default();
                    let st = serde_json::to_value(i.status).unwrap_or_default();
                    vec![
                        s.as_str().unwrap_or_default().to_string(),
                        i.k.map(|k| k.to_string()).unwrap_or_default(),
                        i.lhs.to_f64().to_string(),
                        i.rhs.to_f64().to_string(),
                        st.as_str().unwrap_or_default().to_string(),
                    ]
                })
                .collect();
            let mut o = Outcome::json(&ledger)?
                .with_table(vec!["shape", "k", "lhs", "rhs", "status"], rows);
            o.failed = !ledger.is_clean();
            o
        }
        Command::Intersect { targets: t, depth } => {
            let ts = targets(t)?;
            let covers = ts
                .iter()
                .map(|y| cover(y, *depth, cfg))
                .collect::<lambdaset::Result<Vec<_>>>()?;
            let c = intersect_covers(&covers);
            let rows = c
                .intervals
                .iter()
                .map(|i| vec![i.lo.lo().to_decimal_string(), i.hi.hi().to_decimal_string()])
                .collect();
            Outcome::json(&c)?.with_table(vec!["lo", "hi"], rows)
        }
        Command::Common {
            targets: t,
            depth,
            tolerance_log2,
        } => {
            let ts = targets(t)?;
            let mut search = CommonSearch::new(*depth);
            search.tolerance_log2 = *tolerance_log2;
            let certs = find_common_with(&ts, &search, cfg)?;
            let rows = certs
                .iter()
                .map(|c| {
                    let st = serde_json::to_value(c.status).unwrap_or_default();
                    let [lo, hi] = enc_cells(&c.lambda);
                    vec![
                        lo,
                        hi,
                        st.as_str().unwrap_or_default().to_string(),
                        c.per_target_codings
                            .iter()
                            .map(ToString::to_string)
                            .collect::<Vec<_>>()
                            .join(" "),
                    ]
                })
                .collect();
            Outcome::json(&certs)?
                .with_table(vec!["lambda_lo", "lambda_hi", "status", "codings"], rows)
        }
        Command::SvgGaps { x, depth, width } => {
            let x = target(x, &mut notes)?;
            Outcome {
                payload: Payload::Svg(svg::gap_diagram(&x, *depth, *width, cfg)?),
                table: None,
                failed: false,
                notes: vec![],
            }
        }
    };
    out.notes.extend(notes);
    Ok(out)
}
