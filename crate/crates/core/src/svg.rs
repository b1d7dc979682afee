//! Minimal deterministic SVG rendering for domains, covering heatmaps and
//! entropy curves.
//!
//! The emitters are hand-rolled string builders: no styling indirection,
//! fixed decimal precision (nine digits, comfortably inside the 1e−9
//! geometry tolerance the artifacts promise), and iteration orders taken
//! straight from the underlying data, so identical inputs give identical
//! bytes on every platform.

use crate::engine::StepTrace;
use crate::entropy::EntropyEstimate;
use crate::plane_domains::PlanarDomain;
use crate::winding::CoveringGridReport;
use std::fmt::Write as _;

const CANVAS: f64 = 720.0;
const MARGIN: f64 = 40.0;

/// Affine map from plane coordinates to canvas coordinates with the
/// vertical axis flipped to the usual mathematical orientation.
struct Mapper {
    x0: f64,
    y1: f64,
    scale: f64,
    height: f64,
}

impl Mapper {
    fn fit(x0: f64, x1: f64, y0: f64, y1: f64) -> Mapper {
        let w = (x1 - x0).max(f64::MIN_POSITIVE);
        let h = (y1 - y0).max(f64::MIN_POSITIVE);
        let scale = (CANVAS - 2.0 * MARGIN) / w.max(h);
        Mapper {
            x0,
            y1,
            scale,
            height: h * scale + 2.0 * MARGIN,
        }
    }

    fn x(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) * self.scale
    }

    fn y(&self, y: f64) -> f64 {
        MARGIN + (self.y1 - y) * self.scale
    }
}

fn header(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

/// Draw every outline contour of the domain as a closed path.
pub fn domain_svg(domain: &PlanarDomain) -> String {
    let (x0, x1, y0, y1) = domain.bounding_box();
    let pad = 0.05 * ((x1 - x0) + (y1 - y0)).max(f64::MIN_POSITIVE);
    let m = Mapper::fit(x0 - pad, x1 + pad, y0 - pad, y1 + pad);
    let mut out = header(CANVAS, m.height);
    let _ = writeln!(
        out,
        "<title>{}</title>",
        xml_escape(&domain.label)
    );
    for contour in domain.outline() {
        if contour.points.is_empty() {
            continue;
        }
        let mut d = String::new();
        for (i, p) in contour.points.iter().enumerate() {
            let _ = write!(
                d,
                "{}{:.9} {:.9} ",
                if i == 0 { "M" } else { "L" },
                m.x(p.re),
                m.y(p.im)
            );
        }
        d.push('Z');
        let _ = writeln!(
            out,
            "<path d=\"{d}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.2\"/>"
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Color the covering grid by verified preimage count: under-covered
/// targets red, covered targets green (darker with higher count), skipped
/// targets gray.
pub fn heatmap_svg(report: &CoveringGridReport) -> String {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in report
        .points
        .iter()
        .map(|g| g.w)
        .chain(report.skipped.iter().copied())
    {
        x0 = x0.min(p.re);
        x1 = x1.max(p.re);
        y0 = y0.min(p.im);
        y1 = y1.max(p.im);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let pad = report.grid_step;
    let m = Mapper::fit(x0 - pad, x1 + pad, y0 - pad, y1 + pad);
    let cell = report.grid_step * m.scale;
    let max_count = report.points.iter().map(|g| g.count).max().unwrap_or(1).max(1);
    let mut out = header(CANVAS, m.height);
    let _ = writeln!(
        out,
        "<title>covering of {} from {} (need {})</title>",
        xml_escape(&report.target_id),
        xml_escape(&report.source_id),
        report.n_required
    );
    let rect = |x: f64, y: f64, color: &str, label: String, out: &mut String| {
        let _ = writeln!(
            out,
            "<rect x=\"{:.9}\" y=\"{:.9}\" width=\"{:.9}\" height=\"{:.9}\" fill=\"{color}\"><title>{label}</title></rect>",
            m.x(x) - 0.5 * cell,
            m.y(y) - 0.5 * cell,
            cell,
            cell
        );
    };
    for g in &report.points {
        let color = if g.count < report.n_required {
            "#d62728".to_string()
        } else {
            // Scale from light to dark green with the count.
            let t = g.count as f64 / max_count as f64;
            let level = (200.0 - 140.0 * t).round() as u32;
            format!("#{:02x}{:02x}{:02x}", level / 2, level, level / 2)
        };
        rect(
            g.w.re,
            g.w.im,
            &color,
            format!("({:.6}, {:.6}): count {}", g.w.re, g.w.im, g.count),
            &mut out,
        );
    }
    for s in &report.skipped {
        rect(
            s.re,
            s.im,
            "#bbbbbb",
            format!("({:.6}, {:.6}): skipped", s.re, s.im),
            &mut out,
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Plot the normalized curve `n ↦ log K(n, δ_min)/n` with a dashed line
/// at the growth-rate estimate.
pub fn curve_svg(estimate: &EntropyEstimate) -> String {
    let mut out = header(CANVAS, CANVAS * 0.625);
    let w = CANVAS - 2.0 * MARGIN;
    let h = CANVAS * 0.625 - 2.0 * MARGIN;
    let n_max = estimate.curve.iter().map(|c| c.n).max().unwrap_or(1).max(1);
    let v_max = estimate
        .curve
        .iter()
        .map(|c| c.value)
        .fold(estimate.h_lower, f64::max)
        .max(f64::MIN_POSITIVE);
    let px = |n: u32| MARGIN + w * (n as f64 - 1.0) / (n_max as f64 - 1.0).max(1.0);
    let py = |v: f64| MARGIN + h * (1.0 - v / (1.1 * v_max));
    let _ = writeln!(
        out,
        "<title>separated-set growth on {}</title>",
        xml_escape(&estimate.compact_set_id)
    );
    let _ = writeln!(
        out,
        "<line x1=\"{:.9}\" y1=\"{:.9}\" x2=\"{:.9}\" y2=\"{:.9}\" stroke=\"black\"/>",
        MARGIN,
        MARGIN + h,
        MARGIN + w,
        MARGIN + h
    );
    let _ = writeln!(
        out,
        "<line x1=\"{:.9}\" y1=\"{:.9}\" x2=\"{:.9}\" y2=\"{:.9}\" stroke=\"black\"/>",
        MARGIN,
        MARGIN,
        MARGIN,
        MARGIN + h
    );
    if !estimate.curve.is_empty() {
        let mut d = String::new();
        for (i, c) in estimate.curve.iter().enumerate() {
            let _ = write!(
                d,
                "{}{:.9} {:.9} ",
                if i == 0 { "M" } else { "L" },
                px(c.n),
                py(c.value)
            );
        }
        let _ = writeln!(
            out,
            "<path d=\"{d}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>"
        );
        for c in &estimate.curve {
            let _ = writeln!(
                out,
                "<circle cx=\"{:.9}\" cy=\"{:.9}\" r=\"2.5\" fill=\"#1f77b4\"><title>n = {}: {:.6}</title></circle>",
                px(c.n),
                py(c.value),
                c.n,
                c.value
            );
        }
    }
    let hy = py(estimate.h_lower);
    let _ = writeln!(
        out,
        "<line x1=\"{:.9}\" y1=\"{hy:.9}\" x2=\"{:.9}\" y2=\"{hy:.9}\" stroke=\"#2ca02c\" stroke-dasharray=\"6 4\"/>",
        MARGIN,
        MARGIN + w
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.9}\" y=\"{:.9}\" font-size=\"13\" fill=\"#2ca02c\">growth rate {:.6}</text>",
        MARGIN + 6.0,
        hy - 6.0,
        estimate.h_lower
    );
    out.push_str("</svg>\n");
    out
}

/// Bar-less textual trace rendering: one line per schedule step. Useful
/// in reports where a failed search still needs a figure slot.
pub fn trace_svg(trace: &[StepTrace]) -> String {
    let height = (trace.len() as f64 * 20.0 + 2.0 * MARGIN).max(120.0);
    let mut out = header(CANVAS, height);
    let _ = writeln!(out, "<title>radius schedule trace</title>");
    for (i, t) in trace.iter().enumerate() {
        let _ = writeln!(
            out,
            "<text x=\"{:.9}\" y=\"{:.9}\" font-size=\"12\" font-family=\"monospace\">step {} (R = {}): {}</text>",
            MARGIN,
            MARGIN + 20.0 * i as f64,
            t.step,
            t.r,
            xml_escape(&t.decision)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
