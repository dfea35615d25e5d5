//! Planar primitives shared by every stage of the pipeline.
//!
//! Rings are stored open (the closing vertex is implicit) and, unless a
//! function says otherwise, are expected in clockwise order under the y-up
//! convention, which gives them a negative shoelace area.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A point or vector in the projected plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z component of the 3D cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Unit vector, or the zero vector for a zero-length input.
    pub fn normalized(self) -> Point {
        let n = self.norm();
        if n == 0.0 {
            Point::default()
        } else {
            Point::new(self.x / n, self.y / n)
        }
    }

    /// Rotated by +90 degrees (counter-clockwise).
    pub fn perp_ccw(self) -> Point {
        Point::new(-self.y, self.x)
    }

    /// Rotated by -90 degrees (clockwise).
    pub fn perp_cw(self) -> Point {
        Point::new(self.y, -self.x)
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(self.x + (other.x - self.x) * t, self.y + (other.y - self.y) * t)
    }

    pub fn midpoint(self, other: Point) -> Point {
        self.lerp(other, 0.5)
    }

    pub fn from_angle(theta: f64) -> Point {
        Point::new(theta.cos(), theta.sin())
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Point {
    fn add_assign(&mut self, rhs: Point) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Shoelace signed area. Negative for clockwise rings.
pub fn signed_area(ring: &[Point]) -> f64 {
    let n = ring.len();
    if n < 3 {
        return 0.0;
    }
    // Anchored at the first vertex to keep cancellation small for large
    // projected coordinates.
    let o = ring[0];
    let mut twice = 0.0;
    for i in 1..n - 1 {
        twice += (ring[i] - o).cross(ring[i + 1] - o);
    }
    0.5 * twice
}

pub fn area(ring: &[Point]) -> f64 {
    signed_area(ring).abs()
}

pub fn perimeter(ring: &[Point]) -> f64 {
    edges(ring).map(|(a, b)| a.distance(b)).sum()
}

/// Area centroid of a simple ring. Falls back to the vertex mean when the
/// ring has no area.
pub fn centroid(ring: &[Point]) -> Point {
    let n = ring.len();
    if n == 0 {
        return Point::default();
    }
    let o = ring[0];
    let mut a2 = 0.0;
    let mut c = Point::default();
    for i in 1..n.saturating_sub(1) {
        let p = ring[i] - o;
        let q = ring[i + 1] - o;
        let w = p.cross(q);
        a2 += w;
        c += (p + q) * w;
    }
    if a2.abs() < 1e-300 {
        let sum = ring.iter().fold(Point::default(), |acc, &p| acc + p);
        return sum * (1.0 / n as f64);
    }
    o + c * (1.0 / (3.0 * a2))
}

/// Iterator over `(start, end)` of every ring edge, closing edge included.
pub fn edges(ring: &[Point]) -> impl Iterator<Item = (Point, Point)> + '_ {
    let n = ring.len();
    (0..n).map(move |i| (ring[i], ring[(i + 1) % n]))
}

/// Interior angle in degrees at `cur` for a clockwise ring, in `[0, 360)`.
pub fn interior_angle_deg(prev: Point, cur: Point, next: Point) -> f64 {
    let d_in = cur - prev;
    let d_out = next - cur;
    let turn = d_in.cross(d_out).atan2(d_in.dot(d_out)).to_degrees();
    180.0 + turn
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test (touching counts).
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0))
        && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))
    {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

/// True when no two edges of the ring meet except consecutive edges at their
/// shared vertex, and consecutive edges do not fold back onto each other.
pub fn is_simple(ring: &[Point]) -> bool {
    let n = ring.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        if a == b {
            return false;
        }
        // Adjacent edge folding back over this one.
        let c = ring[(i + 2) % n];
        if orient(a, b, c) == 0.0 && (c - b).dot(a - b) > 0.0 {
            return false;
        }
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_intersect(a, b, ring[j], ring[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

/// Even-odd point-in-polygon test. Points on the boundary may go either way.
pub fn point_in_polygon(p: Point, ring: &[Point]) -> bool {
    let mut inside = false;
    let n = ring.len();
    let mut j = n.wrapping_sub(1);
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Distance from `p` to the closed segment `ab`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Distance from `p` to the infinite line through `a` and `b`.
pub fn point_line_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let n = ab.norm();
    if n == 0.0 {
        return p.distance(a);
    }
    ((p - a).cross(ab) / n).abs()
}

/// Hit of the ray `origin + s * dir` (s > 0) against segment `ab`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    /// Ray parameter, in units of `dir`.
    pub s: f64,
    /// Segment parameter in `[0, 1]`.
    pub t: f64,
    pub point: Point,
}

/// Intersects a ray with a segment. Parallel segments never hit; segment
/// endpoints do.
pub fn ray_segment(origin: Point, dir: Point, a: Point, b: Point) -> Option<RayHit> {
    let e = b - a;
    let denom = dir.cross(e);
    if denom.abs() <= 1e-12 * dir.norm() * e.norm() {
        return None;
    }
    let w = a - origin;
    let s = w.cross(e) / denom;
    let t = w.cross(dir) / denom;
    const EPS: f64 = 1e-9;
    if s <= EPS || !(-EPS..=1.0 + EPS).contains(&t) {
        return None;
    }
    let t = t.clamp(0.0, 1.0);
    Some(RayHit { s, t, point: a + e * t })
}

/// Clips `subject` against the convex polygon `clip` (Sutherland-Hodgman).
///
/// Works for any orientation of `clip`. A concave subject may produce
/// degenerate connecting edges; the shoelace area of the output is still the
/// intersection area.
pub fn clip_convex(subject: &[Point], clip: &[Point]) -> Vec<Point> {
    let sign = if signed_area(clip) < 0.0 { -1.0 } else { 1.0 };
    let mut output = subject.to_vec();
    for (a, b) in edges(clip) {
        if output.is_empty() {
            break;
        }
        let input = std::mem::take(&mut output);
        let inside = |p: Point| sign * (b - a).cross(p - a) >= 0.0;
        let m = input.len();
        for i in 0..m {
            let cur = input[i];
            let prev = input[(i + m - 1) % m];
            let (ci, pi) = (inside(cur), inside(prev));
            if ci {
                if !pi {
                    output.push(line_intersection(prev, cur, a, b));
                }
                output.push(cur);
            } else if pi {
                output.push(line_intersection(prev, cur, a, b));
            }
        }
    }
    output
}

fn line_intersection(p: Point, q: Point, a: Point, b: Point) -> Point {
    let r = q - p;
    let s = b - a;
    let denom = r.cross(s);
    if denom == 0.0 {
        return p;
    }
    let t = (a - p).cross(s) / denom;
    p + r * t
}

/// Bounding box as `(min, max)`.
pub fn bbox(points: &[Point]) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}
