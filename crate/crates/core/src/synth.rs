//! Random orthogonal footprints for tests, benchmarks and throughput runs.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::Point;
use crate::ingest::{BuildingAttributes, FootprintPolygon, RoofType};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyominoParams {
    pub max_cols: usize,
    pub max_rows: usize,
    pub min_cell: f64,
    pub max_cell: f64,
    pub max_vertices: usize,
}

impl Default for PolyominoParams {
    fn default() -> Self {
        Self { max_cols: 6, max_rows: 6, min_cell: 3.0, max_cell: 12.0, max_vertices: 40 }
    }
}

type Cell = (usize, usize);

/// A clockwise simple orthogonal polygon made of grid cells with random
/// column widths and row heights. Coordinates are multiples of 0.5 m.
pub fn random_orthogonal_polygon<R: Rng>(rng: &mut R, params: &PolyominoParams) -> Vec<Point> {
    loop {
        if let Some(ring) = try_polyomino(rng, params) {
            if ring.len() <= params.max_vertices {
                return ring;
            }
        }
    }
}

fn try_polyomino<R: Rng>(rng: &mut R, params: &PolyominoParams) -> Option<Vec<Point>> {
    let cols = rng.gen_range(1..=params.max_cols);
    let rows = rng.gen_range(1..=params.max_rows);
    let steps = ((params.max_cell - params.min_cell) * 2.0) as u32;
    let mut coord = |n: usize| {
        let mut v = vec![0.0];
        for _ in 0..n {
            let w = params.min_cell + 0.5 * rng.gen_range(0..=steps) as f64;
            v.push(v.last().unwrap() + w);
        }
        v
    };
    let xs = coord(cols);
    let ys = coord(rows);
    let target = rng.gen_range(1..=cols * rows);
    let mut cells: BTreeSet<Cell> = BTreeSet::new();
    cells.insert((rng.gen_range(0..cols), rng.gen_range(0..rows)));
    while cells.len() < target {
        let frontier: Vec<Cell> = cells
            .iter()
            .flat_map(|&(i, j)| neighbors(i, j, cols, rows))
            .filter(|c| !cells.contains(c))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if frontier.is_empty() {
            break;
        }
        cells.insert(frontier[rng.gen_range(0..frontier.len())]);
    }
    if has_hole(&cells, cols, rows) || has_pinch(&cells) {
        return None;
    }
    Some(trace_boundary(&cells, &xs, &ys))
}

fn neighbors(i: usize, j: usize, cols: usize, rows: usize) -> impl Iterator<Item = Cell> {
    let mut v = Vec::with_capacity(4);
    if i > 0 {
        v.push((i - 1, j));
    }
    if i + 1 < cols {
        v.push((i + 1, j));
    }
    if j > 0 {
        v.push((i, j - 1));
    }
    if j + 1 < rows {
        v.push((i, j + 1));
    }
    v.into_iter()
}

/// Empty cells not connected to the outside of the grid.
fn has_hole(cells: &BTreeSet<Cell>, cols: usize, rows: usize) -> bool {
    // Flood the padded grid from a corner.
    let (w, h) = (cols + 2, rows + 2);
    let filled = |x: usize, y: usize| x >= 1 && y >= 1 && cells.contains(&(x - 1, y - 1));
    let mut seen = vec![false; w * h];
    let mut stack = vec![(0usize, 0usize)];
    seen[0] = true;
    let mut reached = 0;
    while let Some((x, y)) = stack.pop() {
        reached += 1;
        let mut push = |nx: usize, ny: usize| {
            if nx < w && ny < h && !seen[ny * w + nx] && !filled(nx, ny) {
                seen[ny * w + nx] = true;
                stack.push((nx, ny));
            }
        };
        if x > 0 {
            push(x - 1, y);
        }
        if y > 0 {
            push(x, y - 1);
        }
        push(x + 1, y);
        push(x, y + 1);
    }
    reached != w * h - cells.len()
}

/// Two cells touching only at a corner make the boundary non-simple.
fn has_pinch(cells: &BTreeSet<Cell>) -> bool {
    cells.iter().any(|&(i, j)| {
        let c = |a: usize, b: usize| cells.contains(&(a, b));
        let diag = c(i + 1, j + 1) && !c(i + 1, j) && !c(i, j + 1);
        let anti = i > 0 && c(i - 1, j + 1) && !c(i - 1, j) && !c(i, j + 1);
        diag || anti
    })
}

fn trace_boundary(cells: &BTreeSet<Cell>, xs: &[f64], ys: &[f64]) -> Vec<Point> {
    // Directed grid edges with the interior on the right.
    let mut next: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for &(i, j) in cells {
        let has = |a: Option<usize>, b: Option<usize>| match (a, b) {
            (Some(a), Some(b)) => cells.contains(&(a, b)),
            _ => false,
        };
        if !has(i.checked_sub(1), Some(j)) {
            next.insert((i, j), (i, j + 1));
        }
        if !has(Some(i), Some(j + 1)) {
            next.insert((i, j + 1), (i + 1, j + 1));
        }
        if !has(Some(i + 1), Some(j)) {
            next.insert((i + 1, j + 1), (i + 1, j));
        }
        if !has(Some(i), j.checked_sub(1)) {
            next.insert((i + 1, j), (i, j));
        }
    }
    let start = *next.keys().next().expect("non-empty polyomino");
    let mut grid = vec![start];
    let mut cur = next[&start];
    while cur != start {
        grid.push(cur);
        cur = next[&cur];
    }
    let n = grid.len();
    let mut ring = Vec::new();
    for k in 0..n {
        let (p, c, q) = (grid[(k + n - 1) % n], grid[k], grid[(k + 1) % n]);
        let straight = (p.0 == c.0 && c.0 == q.0) || (p.1 == c.1 && c.1 == q.1);
        if !straight {
            ring.push(Point::new(xs[c.0], ys[c.1]));
        }
    }
    ring
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    /// Largest vertex displacement in meters.
    pub jitter: f64,
    pub rotate: bool,
    pub max_offset: f64,
}

impl Default for Perturbation {
    fn default() -> Self {
        Self { jitter: 0.05, rotate: true, max_offset: 1000.0 }
    }
}

/// Rotates and translates the ring, then moves each vertex by at most
/// `jitter` meters.
pub fn perturb<R: Rng>(rng: &mut R, ring: &[Point], p: &Perturbation) -> Vec<Point> {
    let theta = if p.rotate { rng.gen_range(0.0..std::f64::consts::FRAC_PI_2) } else { 0.0 };
    let (s, c) = theta.sin_cos();
    let off = if p.max_offset > 0.0 {
        Point::new(rng.gen_range(-p.max_offset..p.max_offset), rng.gen_range(-p.max_offset..p.max_offset))
    } else {
        Point::default()
    };
    ring.iter()
        .map(|q| {
            let r = rng.gen_range(0.0..=p.jitter);
            let a = rng.gen_range(0.0..std::f64::consts::TAU);
            Point::new(q.x * c - q.y * s, q.x * s + q.y * c) + off + Point::from_angle(a) * r
        })
        .collect()
}

const ROOF_MATERIALS: [&str; 4] = ["tile", "slate", "metal", "asphalt"];
const WALL_MATERIALS: [&str; 3] = ["brick", "concrete", "wood"];

/// Deterministic batch of footprints with mixed attributes, laid out on a
/// coarse grid so buildings do not overlap.
pub fn synthetic_footprints(count: usize, seed: u64) -> Vec<FootprintPolygon> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = PolyominoParams { max_cols: 4, max_rows: 4, max_vertices: 24, ..Default::default() };
    let per_row = (count as f64).sqrt().ceil().max(1.0) as usize;
    (0..count)
        .map(|i| {
            let ring = random_orthogonal_polygon(&mut rng, &params);
            let origin = Point::new((i % per_row) as f64 * 60.0, (i / per_row) as f64 * 60.0);
            let roof_type = match rng.gen_range(0..3) {
                0 => RoofType::Flat,
                1 => RoofType::Gable,
                _ => RoofType::Hipped,
            };
            FootprintPolygon {
                id: format!("b{i:05}"),
                vertices: ring.into_iter().map(|p| p + origin).collect(),
                attributes: BuildingAttributes {
                    stories: rng.gen_range(1..=3),
                    roof_type,
                    roof_material: ROOF_MATERIALS[rng.gen_range(0..ROOF_MATERIALS.len())].into(),
                    wall_material: WALL_MATERIALS[rng.gen_range(0..WALL_MATERIALS.len())].into(),
                },
            }
        })
        .collect()
}
