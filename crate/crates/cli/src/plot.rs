//! Static SVG rendering of an instance and, optionally, a solution.

use std::fmt::Write as _;

use cagvrp::{Instance, Solution};

const SIZE: f64 = 640.0;
const MARGIN: f64 = 40.0;

struct Frame {
    min: [f64; 2],
    scale: f64,
}

impl Frame {
    fn fit(inst: &Instance, pad: f64) -> Self {
        let pts = inst.points();
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for p in pts {
            for k in 0..2 {
                min[k] = min[k].min(p[k] - pad);
                max[k] = max[k].max(p[k] + pad);
            }
        }
        let span = (max[0] - min[0]).max(max[1] - min[1]).max(1e-9);
        Frame {
            min,
            scale: (SIZE - 2.0 * MARGIN) / span,
        }
    }

    /// Screen coordinates; `y` grows upwards in the instance.
    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (
            MARGIN + (p[0] - self.min[0]) * self.scale,
            SIZE - MARGIN - (p[1] - self.min[1]) * self.scale,
        )
    }
}

fn closed_polyline(frame: &Frame, inst: &Instance, cycle: &[usize], style: &str, out: &mut String) {
    let pts = inst.points();
    let mut coords: Vec<String> = cycle
        .iter()
        .map(|&i| {
            let (x, y) = frame.map(pts[i]);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    if let Some(first) = coords.first().cloned() {
        coords.push(first);
    }
    let _ = writeln!(out, r#"  <polyline points="{}" fill="none" {style}/>"#, coords.join(" "));
}

/// Renders the depot as a square, stops as filled dots and UAV-served
/// targets as hollow dots. The ground tour is a solid closed polyline and
/// each UAV sub-tour a dashed one. `radius_circles` draws the
/// communication radius around each stop.
pub fn render_svg(inst: &Instance, sol: Option<&Solution>, radius_circles: bool) -> String {
    let pad = if radius_circles { inst.radius() } else { 0.0 };
    let frame = Frame::fit(inst, pad);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"  <rect width="100%" height="100%" fill="white"/>"#);
    let stops: Vec<usize> = sol.map(|s| s.tour.clone()).unwrap_or_default();
    if radius_circles {
        let r = inst.radius() * frame.scale;
        for &s in &stops {
            let (x, y) = frame.map(inst.points()[s]);
            let _ = writeln!(
                out,
                r##"  <circle class="radius" cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="none" stroke="#bbbbbb" stroke-width="0.8"/>"##
            );
        }
    }
    if let Some(sol) = sol {
        for cycle in sol.subtours.values() {
            closed_polyline(
                &frame,
                inst,
                cycle,
                r##"class="subtour" stroke="#d9534f" stroke-width="1.5" stroke-dasharray="6 4""##,
                &mut out,
            );
        }
        closed_polyline(&frame, inst, &sol.tour, r##"class="tour" stroke="#1f4e9c" stroke-width="2""##, &mut out);
    }
    for (i, &p) in inst.points().iter().enumerate() {
        let (x, y) = frame.map(p);
        if i == inst.depot() {
            let _ = writeln!(
                out,
                r#"  <rect class="depot" x="{:.2}" y="{:.2}" width="12" height="12" fill="black"/>"#,
                x - 6.0,
                y - 6.0
            );
        } else if stops.contains(&i) || sol.is_none() {
            let _ = writeln!(out, r#"  <circle class="stop" cx="{x:.2}" cy="{y:.2}" r="5" fill="black"/>"#);
        } else {
            let _ = writeln!(
                out,
                r#"  <circle class="target" cx="{x:.2}" cy="{y:.2}" r="5" fill="white" stroke="black" stroke-width="1.5"/>"#
            );
        }
        let _ = writeln!(
            out,
            r#"  <text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">{i}</text>"#,
            x + 7.0,
            y - 7.0
        );
    }
    out.push_str("</svg>\n");
    out
}
