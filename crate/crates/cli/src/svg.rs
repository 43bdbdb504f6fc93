//! Plain-text SVG of a level-2 window with its families drawn over the grid.

use std::fmt::Write;

use coarsedim::families::BoxFamily;
use coarsedim::{Error, Limits, Result, Window};

const SIZE: f64 = 640.0;
const MARGIN: f64 = 20.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

struct View {
    lo: i64,
    scale: f64,
}

impl View {
    fn x(&self, v: i64) -> f64 {
        MARGIN + (v - self.lo) as f64 * self.scale
    }

    fn y(&self, v: i64) -> f64 {
        SIZE - MARGIN - (v - self.lo) as f64 * self.scale
    }
}

fn line(out: &mut String, v: &View, a: (i64, i64), b: (i64, i64)) {
    let _ = writeln!(
        out,
        r#"    <line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
        v.x(a.0),
        v.y(a.1),
        v.x(b.0),
        v.y(b.1)
    );
}

/// Renders `families` on `w`; the same input always yields the same bytes.
pub fn emit_svg(families: &[BoxFamily], w: &Window, limits: &Limits) -> Result<String> {
    if w.level != 2 {
        return Err(Error::Unsupported(format!("svg output needs level 2, got level {}", w.level)));
    }
    if let Some(f) = families.iter().find(|f| f.level() != 2) {
        return Err(Error::Unsupported(format!("family {:?} has level {}, svg output needs level 2", f.label(), f.level())));
    }
    let side = w.side().max(1) as f64;
    let v = View {
        lo: w.lo,
        scale: (SIZE - 2.0 * MARGIN) / side,
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"  <rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>"#);

    // X₂: lines through even coordinates
    let _ = writeln!(out, r##"  <g id="grid" stroke="#cccccc" stroke-width="0.50">"##);
    let first_even = w.lo + w.lo.rem_euclid(2);
    for c in (first_even..=w.hi).step_by(2) {
        line(&mut out, &v, (c, w.lo), (c, w.hi));
        line(&mut out, &v, (w.lo, c), (w.hi, c));
    }
    let _ = writeln!(out, "  </g>");

    for (i, f) in families.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let members = f.materialize(w, limits)?;
        let _ = writeln!(
            out,
            r#"  <g id="family-{i}" data-label="{}" stroke="{colour}" fill="{colour}" stroke-width="2.00">"#,
            escape(f.label())
        );
        for r in &members.refs {
            let [x0, x1] = [r.bounds[0][0].max(w.lo), r.bounds[0][1].min(w.hi)];
            let [y0, y1] = [r.bounds[1][0].max(w.lo), r.bounds[1][1].min(w.hi)];
            if x0 == x1 && y0 == y1 {
                let _ = writeln!(out, r#"    <circle cx="{:.2}" cy="{:.2}" r="3.00"/>"#, v.x(x0), v.y(y0));
                continue;
            }
            let start = |a: i64| a + a.rem_euclid(2);
            for y in (start(y0)..=y1).step_by(2) {
                if x0 < x1 {
                    line(&mut out, &v, (x0, y), (x1, y));
                }
            }
            for x in (start(x0)..=x1).step_by(2) {
                if y0 < y1 {
                    line(&mut out, &v, (x, y0), (x, y1));
                }
            }
        }
        let _ = writeln!(out, "  </g>");
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
