#![allow(dead_code)]

use footprint3d::geometry::point_in_polygon;
use footprint3d::Point;

pub fn ring(v: &[(f64, f64)]) -> Vec<Point> {
    v.iter().map(|&(x, y)| Point::new(x, y)).collect()
}

pub fn square() -> Vec<Point> {
    ring(&[(0., 0.), (0., 10.), (10., 10.), (10., 0.)])
}

pub fn l_shape() -> Vec<Point> {
    ring(&[(0., 0.), (0., 5.), (2., 5.), (2., 2.), (4., 2.), (4., 0.)])
}

pub fn t_shape() -> Vec<Point> {
    ring(&[(3., 0.), (3., 6.), (0., 6.), (0., 9.), (9., 9.), (9., 6.), (6., 6.), (6., 0.)])
}

pub fn plus_shape() -> Vec<Point> {
    ring(&[
        (3., 0.),
        (3., 3.),
        (0., 3.),
        (0., 6.),
        (3., 6.),
        (3., 9.),
        (6., 9.),
        (6., 6.),
        (9., 6.),
        (9., 3.),
        (6., 3.),
        (6., 0.),
    ])
}

pub fn u_shape() -> Vec<Point> {
    ring(&[(0., 0.), (0., 6.), (2., 6.), (2., 2.), (6., 2.), (6., 6.), (8., 6.), (8., 0.)])
}

/// 22 vertices, turn string RRLRLRLRLRRLLRRLRLRLRR (9 L).
pub fn twenty_two() -> Vec<Point> {
    let v = [
        (0, 0),
        (0, 1),
        (1, 1),
        (1, 4),
        (4, 4),
        (4, 6),
        (5, 6),
        (5, 11),
        (6, 11),
        (6, 12),
        (8, 12),
        (8, 11),
        (11, 11),
        (11, 12),
        (13, 12),
        (13, 8),
        (15, 8),
        (15, 5),
        (16, 5),
        (16, 2),
        (17, 2),
        (17, 0),
    ];
    v.iter().map(|&(x, y)| Point::new(2.0 * x as f64, 2.0 * y as f64)).collect()
}

pub fn canonical() -> Vec<(&'static str, Vec<Point>)> {
    vec![
        ("square", square()),
        ("l", l_shape()),
        ("t", t_shape()),
        ("plus", plus_shape()),
        ("u", u_shape()),
        ("twenty-two", twenty_two()),
    ]
}

/// Cells of the grid spanned by the ring's distinct coordinates, flagged
/// inside or outside.
pub struct Grid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub inside: Vec<Vec<bool>>,
}

impl Grid {
    pub fn new(ring: &[Point]) -> Self {
        let uniq = |mut v: Vec<f64>| {
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        };
        let xs = uniq(ring.iter().map(|p| p.x).collect());
        let ys = uniq(ring.iter().map(|p| p.y).collect());
        let inside = (0..xs.len() - 1)
            .map(|i| {
                (0..ys.len() - 1)
                    .map(|j| {
                        let c = Point::new(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]));
                        point_in_polygon(c, ring)
                    })
                    .collect()
            })
            .collect();
        Self { xs, ys, inside }
    }

    fn cols(&self) -> usize {
        self.xs.len() - 1
    }

    fn rows(&self) -> usize {
        self.ys.len() - 1
    }

    /// Fewest axis-aligned rectangles on grid lines that tile the inside
    /// cells, by exhaustive search.
    pub fn min_rectangle_partition(&self) -> usize {
        let mut taken = vec![vec![false; self.rows()]; self.cols()];
        let mut best = usize::MAX;
        self.search(&mut taken, 0, &mut best);
        best
    }

    fn search(&self, taken: &mut Vec<Vec<bool>>, used: usize, best: &mut usize) {
        if used >= *best {
            return;
        }
        let free = (0..self.cols())
            .flat_map(|i| (0..self.rows()).map(move |j| (i, j)))
            .find(|&(i, j)| self.inside[i][j] && !taken[i][j]);
        let Some((i0, j0)) = free else {
            *best = used;
            return;
        };
        // The first free cell in column-major order is the lower-left corner
        // of whichever rectangle covers it.
        for i1 in i0..self.cols() {
            if !self.inside[i1][j0] || taken[i1][j0] {
                break;
            }
            for j1 in j0..self.rows() {
                let ok = (i0..=i1).all(|i| self.inside[i][j1] && !taken[i][j1]);
                if !ok {
                    break;
                }
                for i in i0..=i1 {
                    for j in j0..=j1 {
                        taken[i][j] = true;
                    }
                }
                self.search(taken, used + 1, best);
                for i in i0..=i1 {
                    for j in j0..=j1 {
                        taken[i][j] = false;
                    }
                }
            }
        }
    }

    /// Checks that `rects` are grid-aligned and cover every inside cell
    /// exactly once and no outside cell.
    pub fn check_exact_cover(&self, rects: &[[Point; 4]]) -> Result<(), String> {
        let mut count = vec![vec![0u32; self.rows()]; self.cols()];
        for r in rects {
            let x0 = r.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
            let x1 = r.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
            let y0 = r.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
            let y1 = r.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
            for p in r {
                let on_x = p.x == x0 || p.x == x1;
                let on_y = p.y == y0 || p.y == y1;
                if !(on_x && on_y) {
                    return Err(format!("{r:?} is not an axis-aligned rectangle"));
                }
            }
            let find = |v: &[f64], t: f64| v.iter().position(|&q| q == t);
            let (Some(i0), Some(i1), Some(j0), Some(j1)) =
                (find(&self.xs, x0), find(&self.xs, x1), find(&self.ys, y0), find(&self.ys, y1))
            else {
                return Err(format!("{r:?} is not on grid lines"));
            };
            for row in &mut count[i0..i1] {
                for c in &mut row[j0..j1] {
                    *c += 1;
                }
            }
        }
        for i in 0..self.cols() {
            for j in 0..self.rows() {
                let want = u32::from(self.inside[i][j]);
                if count[i][j] != want {
                    return Err(format!("cell ({i}, {j}) covered {} times, expected {want}", count[i][j]));
                }
            }
        }
        Ok(())
    }
}
