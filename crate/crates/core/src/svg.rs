//! Debug drawings of partitions and rectified layouts.

use std::fmt::Write as _;

use crate::geometry::{bbox, Point};
use crate::partition::{DividingPattern, PartitionResult};
use crate::rectify::RectifiedLayout;

const SIZE: f64 = 600.0;
const PAD: f64 = 20.0;

struct Frame {
    lo: Point,
    hi: Point,
    scale: f64,
}

impl Frame {
    fn new(points: &[Point]) -> Self {
        let (lo, hi) = bbox(points);
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
        Self { lo, hi, scale: (SIZE - 2.0 * PAD) / span }
    }

    /// Screen coordinates, y pointing down.
    fn map(&self, p: Point) -> (f64, f64) {
        (PAD + (p.x - self.lo.x) * self.scale, PAD + (self.hi.y - p.y) * self.scale)
    }

    fn path(&self, ring: &[Point]) -> String {
        let mut d = String::new();
        for (i, &p) in ring.iter().enumerate() {
            let (x, y) = self.map(p);
            let _ = write!(d, "{}{x:.2},{y:.2} ", if i == 0 { "M" } else { "L" });
        }
        d.push('Z');
        d
    }

    fn open(&self) -> String {
        let w = (self.hi.x - self.lo.x) * self.scale + 2.0 * PAD;
        let h = (self.hi.y - self.lo.y) * self.scale + 2.0 * PAD;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" \
             viewBox=\"0 0 {w:.2} {h:.2}\" font-family=\"monospace\" font-size=\"11\">\n"
        )
    }
}

fn fill(pattern: DividingPattern) -> &'static str {
    match pattern {
        DividingPattern::Fdl => "#9ecae1",
        DividingPattern::Bdl => "#fdae6b",
        DividingPattern::Body => "#c7e9c0",
    }
}

fn label(out: &mut String, frame: &Frame, ring: &[Point], text: &str) {
    let c = ring.iter().fold(Point::new(0.0, 0.0), |a, &p| a + p) * (1.0 / ring.len() as f64);
    let (x, y) = frame.map(c);
    let _ = writeln!(out, "<text x=\"{x:.2}\" y=\"{y:.2}\" text-anchor=\"middle\">{text}</text>");
}

/// Source outline with the cut quads numbered in cut order.
pub fn partition_svg(ring: &[Point], result: &PartitionResult) -> String {
    let frame = Frame::new(ring);
    let mut out = frame.open();
    for q in &result.quads {
        let _ = writeln!(
            out,
            "<path d=\"{}\" fill=\"{}\" stroke=\"#555\" stroke-width=\"1\"/>",
            frame.path(&q.verts_pre),
            fill(q.pattern)
        );
        label(&mut out, &frame, &q.verts_pre, &q.id.to_string());
    }
    let _ = writeln!(out, "<path d=\"{}\" fill=\"none\" stroke=\"#000\" stroke-width=\"2\"/>", frame.path(ring));
    for (i, &p) in ring.iter().enumerate() {
        let (x, y) = frame.map(p);
        let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"2.5\"/>");
        let _ = writeln!(out, "<text x=\"{:.2}\" y=\"{:.2}\" fill=\"#a00\">{i}</text>", x + 3.0, y - 3.0);
    }
    out.push_str("</svg>\n");
    out
}

/// Rectified rectangles over the source outline, active edges in red.
pub fn layout_svg(ring: &[Point], layout: &RectifiedLayout) -> String {
    let mut pts = ring.to_vec();
    pts.extend(layout.rects.iter().flat_map(|r| r.corners));
    let frame = Frame::new(&pts);
    let mut out = frame.open();
    let _ = writeln!(
        out,
        "<path d=\"{}\" fill=\"none\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>",
        frame.path(ring)
    );
    for r in &layout.rects {
        let _ = writeln!(
            out,
            "<path d=\"{}\" fill=\"{}\" fill-opacity=\"0.7\" stroke=\"#000\"/>",
            frame.path(&r.corners),
            fill(r.pattern)
        );
        label(&mut out, &frame, &r.corners, &r.id.to_string());
    }
    for a in &layout.adjacency {
        let (p, q) = layout.rects[a.quad].edge(a.own_edge);
        let ((x1, y1), (x2, y2)) = (frame.map(p), frame.map(q));
        let _ = writeln!(
            out,
            "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"#d00\" stroke-width=\"2\"/>"
        );
    }
    out.push_str("</svg>\n");
    out
}
