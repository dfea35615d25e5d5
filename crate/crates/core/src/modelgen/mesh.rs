//! Indexed triangle meshes and the closed primitives the models are built from.

use std::collections::HashMap;
use std::ops::{Add, Mul, Sub};

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct P3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl P3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: P3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: P3) -> P3 {
        P3::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl Add for P3 {
    type Output = P3;
    fn add(self, o: P3) -> P3 {
        P3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for P3 {
    type Output = P3;
    fn sub(self, o: P3) -> P3 {
        P3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for P3 {
    type Output = P3;
    fn mul(self, s: f64) -> P3 {
        P3::new(self.x * s, self.y * s, self.z * s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeshDefect {
    /// An undirected edge bounded by a number of triangles other than two.
    OpenEdge { a: u32, b: u32, count: usize },
    /// Two triangles traverse an edge in the same direction.
    Inconsistent { a: u32, b: u32 },
    DegenerateTriangle(usize),
    NonPositiveVolume,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Mesh {
    pub vertices: Vec<P3>,
    pub triangles: Vec<[u32; 3]>,
}

impl Mesh {
    pub fn add_vertex(&mut self, p: P3) -> u32 {
        self.vertices.push(p);
        (self.vertices.len() - 1) as u32
    }

    pub fn add_triangle(&mut self, a: u32, b: u32, c: u32) {
        self.triangles.push([a, b, c]);
    }

    /// Planar convex quad, counter-clockwise seen from outside.
    pub fn add_quad(&mut self, a: u32, b: u32, c: u32, d: u32) {
        self.add_triangle(a, b, c);
        self.add_triangle(a, c, d);
    }

    /// Planar convex quad wound so that its normal faces along `outward`.
    pub fn add_quad_facing(&mut self, q: [u32; 4], outward: P3) {
        let [a, b, c, d] = q;
        let n = self.face_normal(a, b, c);
        if n.dot(outward) >= 0.0 {
            self.add_quad(a, b, c, d);
        } else {
            self.add_quad(d, c, b, a);
        }
    }

    fn face_normal(&self, a: u32, b: u32, c: u32) -> P3 {
        let (pa, pb, pc) =
            (self.vertices[a as usize], self.vertices[b as usize], self.vertices[c as usize]);
        (pb - pa).cross(pc - pa)
    }

    /// Enclosed volume, positive for outward-facing winding.
    pub fn signed_volume(&self) -> f64 {
        let Some(&o) = self.vertices.first() else {
            return 0.0;
        };
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| self.vertices[i as usize] - o);
                a.dot(b.cross(c)) / 6.0
            })
            .sum()
    }

    /// Closed, consistently wound and enclosing positive volume.
    pub fn check_closed(&self) -> Result<(), MeshDefect> {
        let mut directed: HashMap<(u32, u32), usize> = HashMap::new();
        for (i, t) in self.triangles.iter().enumerate() {
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(MeshDefect::DegenerateTriangle(i));
            }
            for k in 0..3 {
                *directed.entry((t[k], t[(k + 1) % 3])).or_default() += 1;
            }
        }
        let mut keys: Vec<_> = directed.keys().copied().collect();
        keys.sort_unstable();
        for (a, b) in keys {
            let fwd = directed[&(a, b)];
            let back = directed.get(&(b, a)).copied().unwrap_or(0);
            if fwd > 1 {
                return Err(MeshDefect::Inconsistent { a, b });
            }
            if back != 1 {
                return Err(MeshDefect::OpenEdge { a: a.min(b), b: a.max(b), count: fwd + back });
            }
        }
        if self.signed_volume() <= 0.0 {
            return Err(MeshDefect::NonPositiveVolume);
        }
        Ok(())
    }

    pub fn is_watertight(&self) -> bool {
        self.check_closed().is_ok()
    }

    pub fn bbox(&self) -> (P3, P3) {
        let mut lo = P3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = P3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = P3::new(lo.x.min(v.x), lo.y.min(v.y), lo.z.min(v.z));
            hi = P3::new(hi.x.max(v.x), hi.y.max(v.y), hi.z.max(v.z));
        }
        (lo, hi)
    }
}

/// Newell normal of a planar polygon.
pub fn polygon_normal(poly: &[P3]) -> P3 {
    let n = poly.len();
    let mut acc = P3::default();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        acc = acc + P3::new((a.y - b.y) * (a.z + b.z), (a.z - b.z) * (a.x + b.x), (a.x - b.x) * (a.y + b.y));
    }
    acc
}

/// Closed prism swept from a planar convex polygon along `offset`.
pub fn extrude(poly: &[P3], offset: P3) -> Mesh {
    let mut base: Vec<P3> = poly.to_vec();
    // Wind the base so that its normal points along the sweep.
    if polygon_normal(&base).dot(offset) < 0.0 {
        base.reverse();
    }
    let n = base.len() as u32;
    let mut m = Mesh::default();
    for &p in &base {
        m.add_vertex(p);
    }
    for &p in &base {
        m.add_vertex(p + offset);
    }
    // Far cap keeps the base winding, near cap is reversed.
    for i in 1..n - 1 {
        m.add_triangle(n, n + i, n + i + 1);
        m.add_triangle(0, i + 1, i);
    }
    for i in 0..n {
        let j = (i + 1) % n;
        m.add_quad(i, j, n + j, n + i);
    }
    m
}

/// Prism between two corresponding planar convex polygons (`far` lies on the
/// side `near`'s normal should face after winding).
pub fn loft(near: &[P3], far: &[P3]) -> Mesh {
    debug_assert_eq!(near.len(), far.len());
    let n = near.len();
    let centroid = |ps: &[P3]| ps.iter().fold(P3::default(), |a, &p| a + p) * (1.0 / ps.len() as f64);
    let dir = centroid(far) - centroid(near);
    let (mut near, mut far) = (near.to_vec(), far.to_vec());
    if polygon_normal(&near).dot(dir) < 0.0 {
        near.reverse();
        far.reverse();
    }
    let n32 = n as u32;
    let mut m = Mesh::default();
    for &p in near.iter().chain(&far) {
        m.add_vertex(p);
    }
    for i in 1..n32 - 1 {
        m.add_triangle(n32, n32 + i, n32 + i + 1);
        m.add_triangle(0, i + 1, i);
    }
    for i in 0..n32 {
        let j = (i + 1) % n32;
        m.add_quad(i, j, n32 + j, n32 + i);
    }
    m
}
