//! Box bodies with recessed window and door openings.
//!
//! Walls are subdivided on a grid: z breaks are shared by all four walls so
//! vertical corners line up, and each wall adds the s breaks of its own
//! openings. An opening replaces its grid cells with a pocket (four side
//! strips and a back face) so the solid stays closed without boolean ops.

use serde::Serialize;

use super::mesh::{extrude, Mesh, P3};
use super::{Solid, SolidKind};
use crate::geometry::{point_line_distance, Point};
use crate::rectify::{RectifiedLayout, Rect};

/// Contact tolerance between rectangle edges of one layout, in meters.
const CONTACT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpeningSpec {
    pub windows: bool,
    pub window_width: f64,
    pub window_height: f64,
    pub sill_height: f64,
    /// Minimum gap between neighboring openings.
    pub spacing: f64,
    /// Minimum distance from an opening to the end of its free interval.
    pub margin: f64,
    pub door: bool,
    pub door_width: f64,
    pub door_height: f64,
    pub door_sill: f64,
    /// Recess depth.
    pub depth: f64,
}

impl Default for OpeningSpec {
    fn default() -> Self {
        Self {
            windows: true,
            window_width: 1.2,
            window_height: 1.2,
            sill_height: 0.9,
            spacing: 1.5,
            margin: 0.5,
            door: true,
            door_width: 1.0,
            door_height: 2.1,
            door_sill: 0.05,
            depth: 0.1,
        }
    }
}

impl OpeningSpec {
    pub fn none() -> Self {
        Self { windows: false, door: false, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OpeningKind {
    Window,
    Door,
}

/// An opening on edge `edge` of rectangle `rect`, spanning `[s0, s1]` meters
/// from the edge's start corner and `[z0, z1]` in height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Opening {
    pub rect: usize,
    pub edge: usize,
    pub kind: OpeningKind,
    pub s0: f64,
    pub s1: f64,
    pub z0: f64,
    pub z1: f64,
}

/// Parts of edge `edge` of `layout.rects[rect]` not touched by any other
/// rectangle, as `[s0, s1]` intervals from the edge's start corner.
pub fn free_intervals(layout: &RectifiedLayout, rect: usize, edge: usize) -> Vec<(f64, f64)> {
    let (a, b) = layout.rects[rect].edge(edge);
    let len = a.distance(b);
    let dir = (b - a).normalized();
    let mut taken: Vec<(f64, f64)> = Vec::new();
    for (j, other) in layout.rects.iter().enumerate() {
        if j == rect {
            continue;
        }
        for e in 0..4 {
            let (p, q) = other.edge(e);
            if point_line_distance(p, a, b) > CONTACT_TOL || point_line_distance(q, a, b) > CONTACT_TOL {
                continue;
            }
            let (sp, sq) = ((p - a).dot(dir), (q - a).dot(dir));
            let (lo, hi) = (sp.min(sq).max(0.0), sp.max(sq).min(len));
            if hi - lo > CONTACT_TOL {
                taken.push((lo, hi));
            }
        }
    }
    subtract_intervals((0.0, len), taken)
}

fn subtract_intervals(whole: (f64, f64), mut cuts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    cuts.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out = Vec::new();
    let mut cursor = whole.0;
    for (lo, hi) in cuts {
        if lo > cursor {
            out.push((cursor, lo.min(whole.1)));
        }
        cursor = cursor.max(hi);
    }
    if cursor < whole.1 {
        out.push((cursor, whole.1));
    }
    out.retain(|(lo, hi)| hi - lo > CONTACT_TOL);
    out
}

/// Evenly spaced slots of `width` inside `[lo, hi]`, keeping `margin` to both
/// ends and `gap` between slots.
fn slots(lo: f64, hi: f64, width: f64, gap: f64, margin: f64) -> Vec<(f64, f64)> {
    let usable = hi - lo - 2.0 * margin;
    if usable < width {
        return Vec::new();
    }
    let n = ((usable + gap) / (width + gap)).floor() as usize;
    let span = n as f64 * width + (n - 1) as f64 * gap;
    let start = lo + 0.5 * (hi - lo - span);
    (0..n)
        .map(|k| {
            let s0 = start + k as f64 * (width + gap);
            (s0, s0 + width)
        })
        .collect()
}

/// Windows on every story of every free wall interval, plus one ground-floor
/// door on the longest free interval when `with_door` is set.
pub fn plan_openings(
    layout: &RectifiedLayout,
    rect: usize,
    stories: u32,
    floor_height: f64,
    spec: &OpeningSpec,
    with_door: bool,
) -> (Vec<Opening>, Vec<String>) {
    let mut out = Vec::new();
    let mut diags = Vec::new();
    if !spec.windows && !(spec.door && with_door) {
        return (out, diags);
    }
    let r = &layout.rects[rect];
    let shortest = (0..4).map(|e| {
        let (a, b) = r.edge(e);
        a.distance(b)
    });
    let shortest = shortest.fold(f64::INFINITY, f64::min);
    if spec.depth <= 0.0 || spec.depth >= 0.25 * shortest || spec.margin <= spec.depth {
        diags.push(format!("rect {rect}: opening depth {:.3} does not fit, openings skipped", spec.depth));
        return (out, diags);
    }
    let free: Vec<(usize, (f64, f64))> =
        (0..4).flat_map(|e| free_intervals(layout, rect, e).into_iter().map(move |iv| (e, iv))).collect();

    let mut door = None;
    if spec.door && with_door {
        let fits = spec.door_sill > 0.0 && spec.door_sill + spec.door_height <= floor_height - 0.1;
        let longest = free
            .iter()
            .copied()
            .filter(|(_, (lo, hi))| hi - lo >= spec.door_width + 2.0 * spec.margin)
            .max_by(|x, y| (x.1 .1 - x.1 .0).total_cmp(&(y.1 .1 - y.1 .0)));
        match (fits, longest) {
            (true, Some((e, (lo, hi)))) => {
                let mid = 0.5 * (lo + hi);
                let d = Opening {
                    rect,
                    edge: e,
                    kind: OpeningKind::Door,
                    s0: mid - 0.5 * spec.door_width,
                    s1: mid + 0.5 * spec.door_width,
                    z0: spec.door_sill,
                    z1: spec.door_sill + spec.door_height,
                };
                out.push(d);
                door = Some(d);
            }
            _ => diags.push(format!("rect {rect}: door does not fit any free facade, skipped")),
        }
    }

    if spec.windows {
        let top_gap = floor_height - spec.sill_height - spec.window_height;
        if spec.sill_height <= 0.0 || top_gap < 0.1 {
            diags.push(format!("rect {rect}: window taller than a story, windows skipped"));
            return (out, diags);
        }
        for story in 0..stories {
            let z0 = story as f64 * floor_height + spec.sill_height;
            for &(e, (lo, hi)) in &free {
                let mut pieces = vec![(lo, hi)];
                if let Some(d) = door.filter(|d| story == 0 && d.edge == e && d.s0 >= lo && d.s1 <= hi) {
                    // Windows keep their spacing from the door.
                    pieces = subtract_intervals(
                        (lo, hi),
                        vec![(d.s0 - spec.spacing + spec.margin, d.s1 + spec.spacing - spec.margin)],
                    );
                }
                for (plo, phi) in pieces {
                    for (s0, s1) in slots(plo, phi, spec.window_width, spec.spacing, spec.margin) {
                        out.push(Opening {
                            rect,
                            edge: e,
                            kind: OpeningKind::Window,
                            s0,
                            s1,
                            z0,
                            z1: z0 + spec.window_height,
                        });
                    }
                }
            }
        }
    }
    (out, diags)
}

fn breaks(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    v
}

/// Closed box over `rect` from z = 0 to `height`, with recessed openings.
pub fn build_body(rect: &Rect, height: f64, openings: &[Opening], depth: f64, material: &str) -> Solid {
    let mesh = if openings.is_empty() {
        let base: Vec<P3> = rect.corners.iter().map(|c| P3::new(c.x, c.y, 0.0)).collect();
        extrude(&base, P3::new(0.0, 0.0, height))
    } else {
        body_with_openings(rect, height, openings, depth)
    };
    Solid { kind: SolidKind::Body, rect: rect.id, mesh, material: material.to_string(), roof_plane: None }
}

fn body_with_openings(rect: &Rect, height: f64, openings: &[Opening], depth: f64) -> Mesh {
    let c = rect.corners;
    let zs = breaks(
        [0.0, height].into_iter().chain(openings.iter().flat_map(|o| [o.z0, o.z1])).collect(),
    );
    let nz = zs.len();
    // Perimeter positions, wall by wall, each wall's end being the next
    // wall's start.
    let mut ring: Vec<Point> = Vec::new();
    let mut wall_s: Vec<Vec<f64>> = Vec::with_capacity(4);
    let mut wall_base = [0usize; 4];
    for k in 0..4 {
        let (a, b) = (c[k], c[(k + 1) % 4]);
        let len = a.distance(b);
        let s = breaks(
            [0.0, len]
                .into_iter()
                .chain(openings.iter().filter(|o| o.edge == k).flat_map(|o| [o.s0, o.s1]))
                .collect(),
        );
        wall_base[k] = ring.len();
        let dir = (b - a).normalized();
        for &si in &s[..s.len() - 1] {
            ring.push(if si == 0.0 { a } else { a + dir * si });
        }
        wall_s.push(s);
    }
    let m = ring.len();
    let ring_index = |k: usize, i: usize| {
        if i == wall_s[k].len() - 1 {
            wall_base[(k + 1) % 4] % m
        } else {
            wall_base[k] + i
        }
    };
    let mut mesh = Mesh::default();
    for &z in &zs {
        for p in &ring {
            mesh.add_vertex(P3::new(p.x, p.y, z));
        }
    }
    let vid = |zi: usize, r: usize| (zi * m + r) as u32;
    let z_index = |z: f64| zs.iter().position(|&q| (q - z).abs() < 1e-9).expect("z break");

    for k in 0..4 {
        let (a, b) = (c[k], c[(k + 1) % 4]);
        let dir = (b - a).normalized();
        let out2 = dir.perp_ccw();
        let outward = P3::new(out2.x, out2.y, 0.0);
        let s = &wall_s[k];
        let s_index = |v: f64| s.iter().position(|&q| (q - v).abs() < 1e-9).expect("s break");
        let wall_openings: Vec<(usize, usize, usize, usize)> = openings
            .iter()
            .filter(|o| o.edge == k)
            .map(|o| (s_index(o.s0), s_index(o.s1), z_index(o.z0), z_index(o.z1)))
            .collect();
        for i in 0..s.len() - 1 {
            for zi in 0..nz - 1 {
                let inside = wall_openings
                    .iter()
                    .any(|&(i0, i1, j0, j1)| i >= i0 && i < i1 && zi >= j0 && zi < j1);
                if !inside {
                    let (r0, r1) = (ring_index(k, i), ring_index(k, i + 1));
                    mesh.add_quad_facing([vid(zi, r0), vid(zi, r1), vid(zi + 1, r1), vid(zi + 1, r0)], outward);
                }
            }
        }
        let inward = Point::new(-out2.x, -out2.y) * depth;
        for &(i0, i1, j0, j1) in &wall_openings {
            let cols = i1 - i0 + 1;
            let mut back = Vec::with_capacity(cols * (j1 - j0 + 1));
            for j in j0..=j1 {
                for i in i0..=i1 {
                    let p = ring[ring_index(k, i)] + inward;
                    back.push(mesh.add_vertex(P3::new(p.x, p.y, zs[j])));
                }
            }
            let bid = |i: usize, j: usize| back[(j - j0) * cols + (i - i0)];
            let fid = |i: usize, j: usize| vid(j, ring_index(k, i));
            for j in j0..j1 {
                for i in i0..i1 {
                    mesh.add_quad_facing([bid(i, j), bid(i + 1, j), bid(i + 1, j + 1), bid(i, j + 1)], outward);
                }
            }
            let up = P3::new(0.0, 0.0, 1.0);
            let along = P3::new(dir.x, dir.y, 0.0);
            for i in i0..i1 {
                mesh.add_quad_facing([fid(i, j0), fid(i + 1, j0), bid(i + 1, j0), bid(i, j0)], up);
                mesh.add_quad_facing([fid(i, j1), fid(i + 1, j1), bid(i + 1, j1), bid(i, j1)], up * -1.0);
            }
            for j in j0..j1 {
                mesh.add_quad_facing([fid(i0, j), fid(i0, j + 1), bid(i0, j + 1), bid(i0, j)], along);
                mesh.add_quad_facing([fid(i1, j), fid(i1, j + 1), bid(i1, j + 1), bid(i1, j)], along * -1.0);
            }
        }
    }
    // Caps fan out from their centers so every perimeter vertex is used.
    let center = c[0].midpoint(c[2]);
    for (zi, facing) in [(0usize, -1.0), (nz - 1, 1.0)] {
        let hub = mesh.add_vertex(P3::new(center.x, center.y, zs[zi]));
        for r in 0..m {
            let (a, b) = (vid(zi, r), vid(zi, (r + 1) % m));
            let (pa, pb) = (ring[r], ring[(r + 1) % m]);
            // Clockwise ring: (hub, a, b) faces down.
            let down = (pa - center).cross(pb - center) < 0.0;
            if down == (facing < 0.0) {
                mesh.add_triangle(hub, a, b);
            } else {
                mesh.add_triangle(hub, b, a);
            }
        }
    }
    mesh
}
