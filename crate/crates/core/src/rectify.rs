//! Snaps partitioned quads to an exactly orthogonal, gap-free layout.
//!
//! All rectangles share one orientation (the main angle). The body is placed
//! first, then every cut quad is re-attached to its neighbor through a
//! shared corner (the generatrix), walking the cuts in reverse order.

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

use crate::geometry::{
    centroid, clip_convex, point_in_polygon, point_line_distance, point_segment_distance,
    signed_area, Point,
};
use crate::partition::{DividingPattern, Neighbor, PartitionResult, Quad};

/// Below this edge length a quad is considered degenerate.
pub const MIN_EDGE: f64 = 1e-6;
/// Distance at which two pre-rectification corners count as the same point.
const CORNER_TOL: f64 = 1e-6;
/// How far outside every quad a checking point may land and still be
/// assigned to the nearest one. Covers the small wedges left where the
/// partition merged a nearly straight vertex.
pub const ADJACENCY_SEARCH_TOL: f64 = 0.5;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum RectifyError {
    #[error("quad {quad} is degenerate (shortest edge {shortest:.3e} m)")]
    DegenerateQuad { quad: usize, shortest: f64 },
    #[error("no neighbor found for quad {quad}")]
    AdjacencyNotFound { quad: usize },
    #[error("quad {quad} has no active edge")]
    MissingActiveEdge { quad: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MainAngle {
    /// Radians in `[0, pi/2)`.
    pub theta: f64,
    /// Total edge length in the winning bin.
    pub bin_support: f64,
}

impl MainAngle {
    pub fn axes(&self) -> (Point, Point) {
        let u = Point::from_angle(self.theta);
        (u, u.perp_ccw())
    }

    /// Nearest of the four axis directions to `d`.
    pub fn snap_direction(&self, d: Point) -> Point {
        let (u, v) = self.axes();
        let (a, b) = (d.dot(u), d.dot(v));
        if a.abs() >= b.abs() {
            if a >= 0.0 { u } else { -u }
        } else if b >= 0.0 {
            v
        } else {
            -v
        }
    }
}

fn inclination_mod_90(d: Point) -> f64 {
    d.y.atan2(d.x).rem_euclid(FRAC_PI_2)
}

/// Length-weighted dominant edge direction modulo 90 degrees.
///
/// Inclinations are binned into 1 degree bins centered on whole degrees,
/// wrapping at 90; the result is the weighted circular mean of the heaviest
/// bin.
pub fn main_angle(ring: &[Point]) -> MainAngle {
    let n = ring.len();
    let mut support = [0.0f64; 90];
    let mut sums = [(0.0f64, 0.0f64); 90];
    for i in 0..n {
        let d = ring[(i + 1) % n] - ring[i];
        let len = d.norm();
        if len == 0.0 {
            continue;
        }
        let phi = inclination_mod_90(d);
        let bin = (phi.to_degrees().round() as usize) % 90;
        support[bin] += len;
        let s = &mut sums[bin];
        s.0 += len * (4.0 * phi).sin();
        s.1 += len * (4.0 * phi).cos();
    }
    let mut best = 0;
    for b in 1..90 {
        if support[b] > support[best] {
            best = b;
        }
    }
    let (s, c) = sums[best];
    let theta = if s == 0.0 { 0.0 } else { (s.atan2(c) / 4.0).rem_euclid(FRAC_PI_2) };
    MainAngle { theta, bin_support: support[best] }
}

/// A quad renumbered so that `pts[0] -> pts[1]` is a long edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedQuad {
    pub pts: [Point; 4],
    pub w_l: f64,
    pub w_s: f64,
    /// Index in the source quad of `pts[0]`.
    pub start: usize,
}

impl OrientedQuad {
    pub fn source_index(&self, i: usize) -> usize {
        (self.start + i) % 4
    }

    pub fn oriented_index(&self, source: usize) -> usize {
        (source + 4 - self.start) % 4
    }
}

/// Renumbers a clockwise quad so that pt1 starts the long edge that faces
/// right in the main-angle frame.
pub fn number_quad(verts: &[Point; 4], theta: &MainAngle) -> Result<OrientedQuad, RectifyError> {
    number_quad_id(verts, theta, 0)
}

fn number_quad_id(
    verts: &[Point; 4],
    theta: &MainAngle,
    id: usize,
) -> Result<OrientedQuad, RectifyError> {
    let edge = |i: usize| verts[(i + 1) % 4] - verts[i];
    let lens: [f64; 4] = std::array::from_fn(|i| edge(i).norm());
    let shortest = lens.iter().cloned().fold(f64::INFINITY, f64::min);
    if shortest < MIN_EDGE {
        return Err(RectifyError::DegenerateQuad { quad: id, shortest });
    }
    let even = 0.5 * (lens[0] + lens[2]);
    let odd = 0.5 * (lens[1] + lens[3]);
    let (first, w_l, w_s) = if even >= odd { (0, even, odd) } else { (1, odd, even) };
    let (u, v) = theta.axes();
    // "Facing right": larger x minus y in the main-angle frame, which also
    // picks the downward edge of an upright pair.
    let facing = |i: usize| {
        let d = edge(i);
        d.dot(u) - d.dot(v)
    };
    let start = if facing(first) >= facing(first + 2) { first } else { first + 2 };
    Ok(OrientedQuad {
        pts: std::array::from_fn(|i| verts[(start + i) % 4]),
        w_l,
        w_s,
        start,
    })
}

/// Exact rectangle with sides `w_l`, `w_s` aligned to the main angle whose
/// corner `mutual` (oriented numbering) sits on `generatrix`.
pub fn rectify_quad(
    quad: &OrientedQuad,
    generatrix: Point,
    mutual: usize,
    theta: &MainAngle,
) -> [Point; 4] {
    let offsets = corner_offsets(quad, theta);
    let p1 = generatrix - offsets[mutual % 4];
    offsets.map(|o| p1 + o)
}

fn corner_offsets(quad: &OrientedQuad, theta: &MainAngle) -> [Point; 4] {
    let d12 = theta.snap_direction(quad.pts[1] - quad.pts[0]);
    let d23 = d12.perp_cw();
    [
        Point::default(),
        d12 * quad.w_l,
        d12 * quad.w_l + d23 * quad.w_s,
        d23 * quad.w_s,
    ]
}

/// The body keeps its centroid.
fn rectify_body(quad: &OrientedQuad, theta: &MainAngle) -> [Point; 4] {
    let offsets = corner_offsets(quad, theta);
    let c = centroid(&quad.pts);
    let p1 = c - offsets[2] * 0.5;
    offsets.map(|o| p1 + o)
}

/// Result of the adjacency search for one cut quad.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjacencyHit {
    pub neighbor: usize,
    pub neighbor_edge: usize,
    /// Own vertex index (source numbering) used as generatrix.
    pub mutual_vertex: usize,
    /// Corner of the neighbor edge the generatrix is measured from.
    pub neighbor_corner: usize,
    /// Distance along the neighbor edge from that corner.
    pub offset: f64,
}

/// Checking point just outside the active edge, away from the quad.
pub fn checking_point(quad: &Quad) -> Option<Point> {
    let e = quad.active_edge?;
    let (a, b) = quad.edge_pre(e);
    let len = a.distance(b);
    let eps = (1e-4 * len).clamp(1e-6, 0.01);
    // The interior of a clockwise quad is to the right of each edge.
    Some(a.midpoint(b) + (b - a).normalized().perp_ccw() * eps)
}

/// Locates the quad on the far side of `quads[active]`'s active edge.
///
/// Only quads cut later (and the body) are searched, since the active edge
/// lay on the remaining body when it was cut.
pub fn find_adjacent(quads: &[Quad], active: usize) -> Result<AdjacencyHit, RectifyError> {
    let quad = &quads[active];
    let e = quad.active_edge.ok_or(RectifyError::MissingActiveEdge { quad: active })?;
    let cp = checking_point(quad).expect("active edge present");
    let neighbor = match (active + 1..quads.len()).find(|&j| point_in_polygon(cp, &quads[j].verts_pre)) {
        Some(j) => j,
        None => (active + 1..quads.len())
            .map(|j| (j, boundary_distance(cp, &quads[j].verts_pre)))
            .filter(|&(_, d)| d <= ADJACENCY_SEARCH_TOL)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(j, _)| j)
            .ok_or(RectifyError::AdjacencyNotFound { quad: active })?,
    };
    let nverts = &quads[neighbor].verts_pre;
    let neighbor_edge = (0..4)
        .min_by(|&i, &j| {
            let di = point_segment_distance(cp, nverts[i], nverts[(i + 1) % 4]);
            let dj = point_segment_distance(cp, nverts[j], nverts[(j + 1) % 4]);
            di.total_cmp(&dj)
        })
        .expect("four edges");
    let own = [e, (e + 1) % 4];
    let corners = [neighbor_edge, (neighbor_edge + 1) % 4];
    for &o in &own {
        for &c in &corners {
            if quad.verts_pre[o].distance(nverts[c]) <= CORNER_TOL {
                return Ok(AdjacencyHit {
                    neighbor,
                    neighbor_edge,
                    mutual_vertex: o,
                    neighbor_corner: c,
                    offset: 0.0,
                });
            }
        }
    }
    // A later cut may have split the active edge; a quad sharing one of its
    // endpoints keeps the split consistent with its siblings.
    for j in active + 1..quads.len() {
        if let Some((o, c, edge)) = corner_along_edge(&quad.verts_pre, own, &quads[j].verts_pre) {
            return Ok(AdjacencyHit {
                neighbor: j,
                neighbor_edge: edge,
                mutual_vertex: o,
                neighbor_corner: c,
                offset: 0.0,
            });
        }
    }
    // Active edge strictly inside the neighbor edge: measure the closest
    // own endpoint from the closest neighbor corner.
    let mut best = (own[0], corners[0], f64::INFINITY);
    for &o in &own {
        for &c in &corners {
            let d = quad.verts_pre[o].distance(nverts[c]);
            if d < best.2 {
                best = (o, c, d);
            }
        }
    }
    let (o, c, _) = best;
    let other = if c == corners[0] { corners[1] } else { corners[0] };
    let dir = (nverts[other] - nverts[c]).normalized();
    Ok(AdjacencyHit {
        neighbor,
        neighbor_edge,
        mutual_vertex: o,
        neighbor_corner: c,
        offset: (quad.verts_pre[o] - nverts[c]).dot(dir),
    })
}

/// A corner of `other` on one end of the own edge `own`, together with the
/// edge of `other` leaving that corner along the own edge.
fn corner_along_edge(
    verts: &[Point; 4],
    own: [usize; 2],
    other: &[Point; 4],
) -> Option<(usize, usize, usize)> {
    let cos_tol = 10f64.to_radians().cos();
    for (o, far) in [(own[0], own[1]), (own[1], own[0])] {
        let along = (verts[far] - verts[o]).normalized();
        for c in 0..4 {
            if verts[o].distance(other[c]) > CORNER_TOL {
                continue;
            }
            let (next, prev) = ((c + 1) % 4, (c + 3) % 4);
            if (other[next] - other[c]).normalized().dot(along) >= cos_tol {
                return Some((o, c, c));
            }
            if (other[prev] - other[c]).normalized().dot(along) >= cos_tol {
                return Some((o, c, prev));
            }
        }
    }
    None
}

fn boundary_distance(p: Point, verts: &[Point; 4]) -> f64 {
    (0..4)
        .map(|i| point_segment_distance(p, verts[i], verts[(i + 1) % 4]))
        .fold(f64::INFINITY, f64::min)
}

/// An exact rectangle of the layout, corners in the source quad's order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub id: usize,
    pub corners: [Point; 4],
    pub pattern: DividingPattern,
}

impl Rect {
    pub fn edge(&self, i: usize) -> (Point, Point) {
        (self.corners[i % 4], self.corners[(i + 1) % 4])
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.corners).abs()
    }

    /// Renumbered so that corner 0 starts the long edge facing right.
    pub fn oriented(&self, theta: &MainAngle) -> OrientedQuad {
        number_quad(&self.corners, theta).expect("layout rectangles are non-degenerate")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adjacency {
    pub quad: usize,
    pub neighbor: usize,
    pub own_edge: usize,
    pub neighbor_edge: usize,
    pub mutual_vertex: usize,
}

#[derive(Debug, Clone)]
pub struct RectifiedLayout {
    pub theta: MainAngle,
    pub quads: Vec<Quad>,
    pub rects: Vec<Rect>,
    pub adjacency: Vec<Adjacency>,
}

/// Rectifies the body, then each cut quad in reverse cut order.
pub fn rectify_all(
    partition: &PartitionResult,
    theta: &MainAngle,
) -> Result<RectifiedLayout, RectifyError> {
    let mut quads = partition.quads.clone();
    let body = quads.len() - 1;
    let oriented = number_quad_id(&quads[body].verts_pre, theta, body)?;
    let post = rectify_body(&oriented, theta);
    quads[body].verts_post = Some(to_source_order(&oriented, post));

    let mut adjacency = Vec::with_capacity(body);
    for i in (0..body).rev() {
        let hit = find_adjacent(&quads, i)?;
        let oriented = number_quad_id(&quads[i].verts_pre, theta, i)?;
        let npost = quads[hit.neighbor].verts_post.expect("neighbor rectified earlier");
        let corner = npost[hit.neighbor_corner];
        let generatrix = if hit.offset == 0.0 {
            corner
        } else {
            let ends = [hit.neighbor_edge, (hit.neighbor_edge + 1) % 4];
            let other = if hit.neighbor_corner == ends[0] { ends[1] } else { ends[0] };
            corner + (npost[other] - corner).normalized() * hit.offset
        };
        let post = rectify_quad(&oriented, generatrix, oriented.oriented_index(hit.mutual_vertex), theta);
        let q = &mut quads[i];
        q.verts_post = Some(to_source_order(&oriented, post));
        q.neighbor = Some(Neighbor {
            quad: hit.neighbor,
            edge: hit.neighbor_edge,
            mutual_vertex: hit.mutual_vertex,
        });
        adjacency.push(Adjacency {
            quad: i,
            neighbor: hit.neighbor,
            own_edge: q.active_edge.expect("cut quads have an active edge"),
            neighbor_edge: hit.neighbor_edge,
            mutual_vertex: hit.mutual_vertex,
        });
    }
    adjacency.reverse();
    let rects = quads
        .iter()
        .map(|q| Rect {
            id: q.id,
            corners: q.verts_post.expect("all quads rectified"),
            pattern: q.pattern,
        })
        .collect();
    Ok(RectifiedLayout { theta: *theta, quads, rects, adjacency })
}

fn to_source_order(oq: &OrientedQuad, post: [Point; 4]) -> [Point; 4] {
    std::array::from_fn(|s| post[oq.oriented_index(s)])
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LayoutReport {
    /// Per adjacency: largest distance from the own active edge's endpoints
    /// to the neighbor edge's line.
    pub residuals: Vec<(usize, f64)>,
    /// Rectangle pairs with a non-zero interior overlap.
    pub overlaps: Vec<(usize, usize, f64)>,
    pub max_residual: f64,
    pub max_overlap: f64,
}

pub const RESIDUAL_TOL: f64 = 1e-9;
pub const OVERLAP_TOL: f64 = 1e-12;

impl LayoutReport {
    pub fn is_clean(&self) -> bool {
        self.max_residual <= RESIDUAL_TOL && self.max_overlap <= OVERLAP_TOL
    }
}

pub fn validate_layout(layout: &RectifiedLayout) -> LayoutReport {
    let mut report = LayoutReport::default();
    for adj in &layout.adjacency {
        let own = &layout.rects[adj.quad];
        let nb = &layout.rects[adj.neighbor];
        let (a, b) = own.edge(adj.own_edge);
        let (p, q) = nb.edge(adj.neighbor_edge);
        let r = point_line_distance(a, p, q).max(point_line_distance(b, p, q));
        report.max_residual = report.max_residual.max(r);
        report.residuals.push((adj.quad, r));
    }
    let boxes: Vec<_> = layout.rects.iter().map(|r| crate::geometry::bbox(&r.corners)).collect();
    for i in 0..layout.rects.len() {
        for j in i + 1..layout.rects.len() {
            let (a, b) = (boxes[i], boxes[j]);
            if a.1.x <= b.0.x || b.1.x <= a.0.x || a.1.y <= b.0.y || b.1.y <= a.0.y {
                continue;
            }
            let clip = clip_convex(&layout.rects[i].corners, &layout.rects[j].corners);
            let area = if clip.len() >= 3 { signed_area(&clip).abs() } else { 0.0 };
            if area > 0.0 {
                report.max_overlap = report.max_overlap.max(area);
                report.overlaps.push((i, j, area));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::partition;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn deg(a: f64) -> MainAngle {
        MainAngle { theta: a.to_radians(), bin_support: 0.0 }
    }

    #[test]
    fn main_angle_of_rotated_rectangle() {
        let sq = [p(0., 0.), p(0., 2.), p(5., 2.), p(5., 0.)];
        assert_eq!(main_angle(&sq).theta, 0.0);
        let t = 30f64.to_radians();
        let rot: Vec<Point> =
            sq.iter().map(|q| p(q.x * t.cos() - q.y * t.sin(), q.x * t.sin() + q.y * t.cos())).collect();
        let m = main_angle(&rot);
        assert!((m.theta - t).abs() < 1e-9);
        assert!((m.bin_support - 14.0).abs() < 1e-9);
    }

    #[test]
    fn main_angle_wraps_near_zero() {
        // Edges at -0.3 and +0.3 degrees share the zero bin.
        let a = 0.3f64.to_radians();
        let ring = [p(0., 0.), p(-10. * a.sin(), 10.), p(10., 10. + 10. * a.tan()), p(10., 0.)];
        let m = main_angle(&ring);
        assert!(m.theta < 1f64.to_radians() || m.theta > 89f64.to_radians());
    }

    #[test]
    fn numbering_picks_downward_long_edge() {
        let q = [p(0., 0.), p(0., 5.), p(2., 5.), p(2., 0.)];
        let o = number_quad(&q, &deg(0.)).unwrap();
        assert_eq!(o.pts[0], p(2., 5.));
        assert_eq!((o.w_l, o.w_s), (5.0, 2.0));
        assert_eq!(o.start, 2);
    }

    #[test]
    fn numbering_square_and_trapezoid() {
        let sq = [p(0., 0.), p(0., 1.), p(1., 1.), p(1., 0.)];
        let o = number_quad(&sq, &deg(0.)).unwrap();
        assert_eq!(o.w_l, o.w_s);
        assert_eq!(o.start % 2, 0);

        let tr = [p(0., 0.), p(0., 2.0), p(5.0, 2.0), p(5.0, -0.2)];
        let o = number_quad(&tr, &deg(0.)).unwrap();
        let e = |i: usize| tr[(i + 1) % 4].distance(tr[i]);
        assert!((o.w_l - 0.5 * (e(1) + e(3))).abs() < 1e-12);
        assert!((o.w_s - 0.5 * (e(0) + e(2))).abs() < 1e-12);
    }

    #[test]
    fn numbering_rejects_degenerate_quad() {
        let q = [p(0., 0.), p(0., 1.), p(0., 1.0 + 1e-9), p(1., 0.)];
        assert!(matches!(number_quad(&q, &deg(0.)), Err(RectifyError::DegenerateQuad { .. })));
    }

    #[test]
    fn corner_formula_cases() {
        // quad (1): a1..a4 around the mutual corner a3 = m2.
        let a = [p(2., 5.), p(2., 0.), p(0., 0.), p(0., 5.)];
        let o = OrientedQuad { pts: a, w_l: 5.0, w_s: 2.0, start: 0 };
        let r = rectify_quad(&o, p(0., 0.), 2, &deg(0.));
        assert_eq!(r, a);
        // quad (3): mutual corner c2 = m4.
        let c = [p(6., 10.), p(10., 10.), p(10., 8.), p(6., 8.)];
        let o = OrientedQuad { pts: c, w_l: 4.0, w_s: 2.0, start: 0 };
        assert_eq!(rectify_quad(&o, p(10., 10.), 1, &deg(0.)), c);
    }

    #[test]
    fn corner_formula_at_thirty_degrees() {
        let t = deg(30.);
        let (u, v) = t.axes();
        let pre = [u * 2.0 + v * 5.0, u * 2.0, p(0., 0.), v * 5.0];
        let o = OrientedQuad { pts: pre, w_l: 5.0, w_s: 2.0, start: 0 };
        let r = rectify_quad(&o, p(0., 0.), 2, &t);
        assert!((r[1].x - 3f64.sqrt()).abs() < 1e-12 && (r[1].y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn l_shape_rectification_is_identity() {
        let ring = vec![p(0., 0.), p(0., 5.), p(2., 5.), p(2., 2.), p(4., 2.), p(4., 0.)];
        let part = partition(&ring).unwrap();
        let layout = rectify_all(&part, &main_angle(&ring)).unwrap();
        for q in &layout.quads {
            let post = q.verts_post.unwrap();
            for (a, b) in q.verts_pre.iter().zip(&post) {
                assert!(a.distance(*b) < 1e-9);
            }
        }
        assert_eq!(layout.adjacency.len(), 1);
        assert_eq!(layout.adjacency[0].neighbor, 1);
        assert!(validate_layout(&layout).is_clean());
    }

    #[test]
    fn checking_point_lies_in_body() {
        let ring = vec![p(0., 0.), p(0., 5.), p(2., 5.), p(2., 2.), p(4., 2.), p(4., 0.)];
        let part = partition(&ring).unwrap();
        let cp = checking_point(&part.quads[0]).unwrap();
        assert!(cp.x < 2.0 && (cp.y - 1.0).abs() < 1e-12);
        let hit = find_adjacent(&part.quads, 0).unwrap();
        assert_eq!(hit.neighbor, 1);
        assert_eq!(hit.offset, 0.0);
    }

    fn hand_layout(dx: f64) -> RectifiedLayout {
        let a = Rect {
            id: 0,
            corners: [p(2. + dx, 2.), p(4., 2.), p(4., 0.), p(2. + dx, 0.)],
            pattern: DividingPattern::Fdl,
        };
        let b = Rect {
            id: 1,
            corners: [p(0., 0.), p(0., 5.), p(2., 5.), p(2., 0.)],
            pattern: DividingPattern::Body,
        };
        RectifiedLayout {
            theta: deg(0.),
            quads: vec![],
            rects: vec![a, b],
            adjacency: vec![Adjacency { quad: 0, neighbor: 1, own_edge: 3, neighbor_edge: 2, mutual_vertex: 3 }],
        }
    }

    #[test]
    fn validate_measures_gap_and_overlap() {
        let clean = validate_layout(&hand_layout(0.0));
        assert!(clean.is_clean());
        assert_eq!((clean.max_residual, clean.max_overlap), (0.0, 0.0));

        let overlap = validate_layout(&hand_layout(-0.01));
        assert!((overlap.max_overlap - 0.02).abs() < 1e-12);

        let gap = validate_layout(&hand_layout(0.01));
        assert!((gap.max_residual - 0.01).abs() < 1e-12);
        assert_eq!(gap.max_overlap, 0.0);
    }
}
