//! SVG figures of analysed solution mappings: the image coloured by component
//! and a strip classifying every grid weight.

use std::fmt::Write as _;

use crate::diagnose::{AnalysisReport, KindReport};
use crate::mapping::{image_points, norm_inf};

const PANEL_W: f64 = 520.0;
const PLOT: f64 = 400.0;
const MARGIN: f64 = 60.0;
const STRIP_H: f64 = 22.0;
const PANEL_H: f64 = MARGIN + PLOT + 40.0 + STRIP_H + 70.0;
/// Points drawn per component; larger clouds are thinned by a fixed stride.
const MAX_DRAWN: usize = 3000;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];
const DOM_BOUNDED: &str = "#4daf4a";
const DOM_UNBOUNDED: &str = "#ff7f00";
const ESCAPING: &str = "#bdbdbd";

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Smallest round radius (1, 2, 5, 10, ...) holding nine tenths of the image,
/// capped by the final window. Points beyond it are counted in the caption.
fn viewport(kr: &KindReport) -> f64 {
    let mut reach: Vec<f64> = kr
        .graph
        .entries
        .iter()
        .flat_map(|e| e.outcome.points())
        .map(|p| norm_inf(&p[..p.len().min(2)]))
        .collect();
    let cap = kr.graph.final_radius();
    if reach.is_empty() {
        return 1.0f64.min(cap);
    }
    reach.sort_by(f64::total_cmp);
    let q = reach[(reach.len() * 9 / 10).min(reach.len() - 1)];
    let mut r = 1.0;
    let mut k = 0;
    while r < q * 1.05 && r < cap {
        r *= [2.0, 2.5, 2.0][k % 3];
        k += 1;
    }
    r.min(cap)
}

fn tick_step(radius: f64) -> f64 {
    let mut step = 1.0;
    let mut k = 0;
    while 2.0 * radius / step > 16.0 {
        step *= [2.0, 2.5, 2.0][k % 3];
        k += 1;
    }
    step
}

struct Frame {
    x0: f64,
    y0: f64,
    r: f64,
}

impl Frame {
    fn sx(&self, v: f64) -> f64 {
        self.x0 + (v + self.r) / (2.0 * self.r) * PLOT
    }
    fn sy(&self, v: f64) -> f64 {
        self.y0 + PLOT - (v + self.r) / (2.0 * self.r) * PLOT
    }
}

fn coords(p: &[f64]) -> (f64, f64) {
    (p[0], p.get(1).copied().unwrap_or(0.0))
}

fn panel(out: &mut String, kr: &KindReport, top: f64) {
    let r = viewport(kr);
    let f = Frame {
        x0: MARGIN,
        y0: top + MARGIN,
        r,
    };
    let a = &kr.analysis;
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" font-size="15" font-weight="bold">{}</text><text x="{:.3}" y="{:.3}" font-size="11">{} component(s), {} unbounded, {}</text>"#,
        MARGIN,
        top + 22.0,
        esc(kr.kind.label()),
        MARGIN,
        top + 40.0,
        a.components.len(),
        a.unbounded_components(),
        if a.domain.is_closed() {
            "domain closed at resolution"
        } else {
            "domain non-closed at resolution"
        }
    );
    let _ = writeln!(
        out,
        r##"<rect x="{:.3}" y="{:.3}" width="{PLOT:.3}" height="{PLOT:.3}" fill="#ffffff" stroke="#000000"/>"##,
        f.x0, f.y0
    );

    let step = tick_step(r);
    let n_ticks = (r / step).floor() as i64;
    for k in -n_ticks..=n_ticks {
        let v = k as f64 * step;
        let (x, y) = (f.sx(v), f.sy(v));
        let _ = writeln!(
            out,
            r##"<line x1="{x:.3}" y1="{:.3}" x2="{x:.3}" y2="{:.3}" stroke="#eeeeee"/><line x1="{:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="#eeeeee"/>"##,
            f.y0,
            f.y0 + PLOT,
            f.x0,
            f.x0 + PLOT
        );
        let _ = writeln!(
            out,
            r#"<text x="{x:.3}" y="{:.3}" font-size="10" text-anchor="middle">{v}</text><text x="{:.3}" y="{:.3}" font-size="10" text-anchor="end">{v}</text>"#,
            f.y0 + PLOT + 14.0,
            f.x0 - 4.0,
            y + 3.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" font-size="12" text-anchor="middle">x1</text><text x="{:.3}" y="{:.3}" font-size="12">x2</text>"#,
        f.x0 + PLOT / 2.0,
        f.y0 + PLOT + 30.0,
        f.x0 - 40.0,
        f.y0 - 6.0
    );

    let pts = image_points(&kr.graph);
    let inside = |p: &[f64]| {
        let (x, y) = coords(p);
        x.abs() <= r && y.abs() <= r
    };
    let outside = pts.iter().filter(|(p, _)| !inside(p)).count();
    if outside > 0 {
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" font-size="10" text-anchor="end">{outside} point(s) beyond the frame</text>"#,
            f.x0 + PLOT,
            f.y0 - 6.0
        );
    }
    let mut flagged = 0;
    for c in &a.components {
        let color = PALETTE[c.id % PALETTE.len()];
        let stride = c.members.len().div_ceil(MAX_DRAWN).max(1);
        let _ = writeln!(out, r#"<g fill="{color}" stroke="none">"#);
        for &m in c.members.iter().step_by(stride) {
            let p = &pts[m].0;
            if !inside(p) {
                continue;
            }
            let (x, y) = coords(p);
            let _ = writeln!(out, r#"<circle cx="{:.3}" cy="{:.3}" r="1.8"/>"#, f.sx(x), f.sy(y));
        }
        let _ = writeln!(out, "</g>");
        if !c.bounded_at_scale {
            arrow(out, &f, c.members.iter().map(|&m| pts[m].0.as_slice()), c.id, flagged);
            flagged += 1;
        }
    }

    strip(out, kr, top + MARGIN + PLOT + 44.0);
}

/// Outward arrow ending at the farthest point of an unbounded component.
fn arrow<'a>(
    out: &mut String,
    f: &Frame,
    members: impl Iterator<Item = &'a [f64]>,
    id: usize,
    slot: usize,
) {
    let tone = id % PALETTE.len();
    let color = PALETTE[tone];
    let pts: Vec<(f64, f64)> = members.map(coords).collect();
    if pts.is_empty() {
        return;
    }
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let far = pts
        .iter()
        .copied()
        .fold((cx, cy), |b, p| if p.0.abs().max(p.1.abs()) > b.0.abs().max(b.1.abs()) { p } else { b });
    let (mut dx, mut dy) = (far.0 - cx, far.1 - cy);
    let len = (dx * dx + dy * dy).sqrt();
    if len > 0.0 {
        dx /= len;
        dy /= len;
    } else {
        let l = (far.0 * far.0 + far.1 * far.1).sqrt().max(1e-300);
        dx = far.0 / l;
        dy = far.1 / l;
    }
    let clamp = |v: f64| v.clamp(-f.r, f.r);
    let (ax, ay) = (f.sx(clamp(far.0)), f.sy(clamp(far.1)));
    // the arrow ends on the clamped point so it stays inside the frame
    let (bx, by) = (ax - 34.0 * dx, ay + 34.0 * dy);
    let _ = writeln!(
        out,
        r#"<line x1="{bx:.3}" y1="{by:.3}" x2="{ax:.3}" y2="{ay:.3}" stroke="{color}" stroke-width="2" marker-end="url(#head{tone})"/>"#
    );
    let lx = (bx + 6.0).min(f.x0 + PLOT - 130.0);
    let below = by + 12.0 * (slot + 1) as f64;
    let ly = if below > f.y0 + PLOT - 4.0 {
        by - 6.0 - 12.0 * slot as f64
    } else {
        below
    };
    let _ = writeln!(
        out,
        r#"<text x="{lx:.3}" y="{:.3}" font-size="10" fill="{color}">component {id} unbounded</text>"#,
        ly
    );
}

fn strip(out: &mut String, kr: &KindReport, y: f64) {
    let entries = &kr.graph.entries;
    let w = PLOT / entries.len().max(1) as f64;
    let _ = writeln!(out, r#"<g stroke="none" shape-rendering="crispEdges">"#);
    for (i, e) in entries.iter().enumerate() {
        let fill = if !e.outcome.in_domain() {
            ESCAPING
        } else if e.outcome.value_unbounded() {
            DOM_UNBOUNDED
        } else {
            DOM_BOUNDED
        };
        let _ = writeln!(
            out,
            r#"<rect x="{:.3}" y="{y:.3}" width="{:.3}" height="{STRIP_H:.3}" fill="{fill}"/>"#,
            MARGIN + i as f64 * w,
            w
        );
    }
    let _ = writeln!(out, "</g>");
    let first = entries.first().map(|e| fmt_w(&e.weight.coords)).unwrap_or_default();
    let last = entries.last().map(|e| fmt_w(&e.weight.coords)).unwrap_or_default();
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" font-size="10">{}</text><text x="{:.3}" y="{:.3}" font-size="10" text-anchor="end">{}</text>"#,
        MARGIN,
        y + STRIP_H + 12.0,
        esc(&first),
        MARGIN + PLOT,
        y + STRIP_H + 12.0,
        esc(&last)
    );
    let legend = [
        (DOM_BOUNDED, "bounded solution set"),
        (DOM_UNBOUNDED, "unbounded solution set"),
        (ESCAPING, "no minimizer"),
    ];
    for (k, (c, label)) in legend.iter().enumerate() {
        let x = MARGIN + k as f64 * 140.0;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.3}" y="{:.3}" width="10" height="10" fill="{c}"/><text x="{:.3}" y="{:.3}" font-size="10">{label}</text>"#,
            y + STRIP_H + 22.0,
            x + 14.0,
            y + STRIP_H + 31.0
        );
    }
}

fn fmt_w(w: &[f64]) -> String {
    let parts: Vec<String> = w.iter().map(|v| format!("{v:.3}")).collect();
    format!("xi = ({})", parts.join(", "))
}

/// Renders every scalarization of `report`, stacked vertically.
pub fn render_report(report: &AnalysisReport) -> String {
    let panels = report.results.len().max(1);
    let height = 40.0 + panels as f64 * PANEL_H;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{PANEL_W:.0}" height="{height:.0}" viewBox="0 0 {PANEL_W:.0} {height:.0}" font-family="sans-serif">"#
    );
    out.push_str("<defs>\n");
    for (k, c) in PALETTE.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<marker id="head{k}" markerWidth="8" markerHeight="8" refX="6" refY="4" orient="auto"><path d="M0,0 L8,4 L0,8 z" fill="{c}"/></marker>"#
        );
    }
    out.push_str("</defs>\n");
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#fafafa"/>"##);
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN:.3}" y="24" font-size="16">{} (N = {})</text>"#,
        esc(&report.problem_name),
        report.config.resolution
    );
    for (k, kr) in report.results.iter().enumerate() {
        panel(&mut out, kr, 40.0 + k as f64 * PANEL_H);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_steps_stay_integer_and_sparse() {
        for r in [4.0, 16.0, 64.0, 256.0] {
            let s = tick_step(r);
            assert_eq!(s.fract(), 0.0);
            assert!(2.0 * r / s <= 16.0);
        }
        assert_eq!(tick_step(4.0), 1.0);
    }

    #[test]
    fn escaping_text() {
        assert_eq!(esc("a<b&c>"), "a&lt;b&amp;c&gt;");
    }
}
