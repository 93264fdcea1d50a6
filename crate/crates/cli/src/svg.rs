//! Static gap diagram: one row per prefix length, showing the cover of
//! `Λ(x)` on `[x, 1/2]`; the white space between bars is certified gaps.

use std::fmt::Write;

use anyhow::Result;
use lambdaset::lambda_set::cover;
use lambdaset::{PrecisionConfig, Rational};
use num_traits::ToPrimitive;

const ROW: f64 = 22.0;
const BAR: f64 = 12.0;
const MARGIN: f64 = 48.0;

pub fn gap_diagram(
    x: &Rational,
    depth: usize,
    width: u32,
    cfg: &PrecisionConfig,
) -> Result<String> {
    let depth = depth.max(1);
    let x0 = x.to_f64().unwrap_or(0.0);
    let span = (0.5 - x0).max(f64::MIN_POSITIVE);
    let w = width.max(200) as f64;
    let plot = w - 2.0 * MARGIN;
    let h = MARGIN * 2.0 + ROW * depth as f64;
    let px = |t: f64| MARGIN + (t - x0) / span * plot;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#
    )?;
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    for d in 1..=depth {
        let c = cover(x, d, cfg)?;
        let y = MARGIN + ROW * (d - 1) as f64;
        writeln!(s, r#"<g class="depth" data-depth="{d}">"#)?;
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{d}</text>"#,
            MARGIN - 8.0,
            y + BAR - 2.0
        )?;
        for i in &c.intervals {
            let a = px(i.lo.lo().to_f64());
            // Keep degenerate intervals visible.
            let b = px(i.hi.hi().to_f64()).max(a + 0.5);
            writeln!(
                s,
                r#"<rect x="{a:.3}" y="{y:.1}" width="{:.3}" height="{BAR}" fill="black"/>"#,
                b - a
            )?;
        }
        writeln!(s, "</g>")?;
    }
    let axis = MARGIN + ROW * depth as f64 + 4.0;
    writeln!(
        s,
        r#"<line x1="{:.1}" y1="{axis:.1}" x2="{:.1}" y2="{axis:.1}" stroke="gray"/>"#,
        px(x0),
        px(0.5)
    )?;
    writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{x}</text>"#,
        px(x0),
        axis + 16.0
    )?;
    writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">1/2</text>"#,
        px(0.5),
        axis + 16.0
    )?;
    writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">cover of Λ({x}) by prefix length</text>"#,
        w / 2.0,
        MARGIN / 2.0
    )?;
    writeln!(s, "</svg>")?;
    Ok(s)
}
