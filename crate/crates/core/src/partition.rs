//! Greedy partition of an approximately orthogonal ring into quadrilaterals.
//!
//! The ring is encoded as a cyclic string of right/left turns. Every left
//! (reflex) vertex can emit two dividing lines by extending one of its
//! incident edges into the interior: forward along the incoming edge, or
//! backward against the outgoing edge. Dividing lines that cut a single
//! rectangle off a run of right turns are ranked and the best one is
//! executed; the loop repeats on the remaining body until it has four
//! vertices.

use std::fmt;

use thiserror::Error;

use crate::geometry::{
    interior_angle_deg, is_simple, point_in_polygon, point_line_distance, ray_segment,
    signed_area, Point,
};

/// Endpoint snapping tolerance for dividing lines, in meters.
pub const DEFAULT_SNAP_TOL: f64 = 1e-6;
/// Half-width of the 90/270 degree windows used to classify turns.
pub const DEFAULT_TURN_TOL_DEG: f64 = 45.0;
/// Shortest edge fragment a cut may leave behind, in meters. Endpoints
/// closer than this to a vertex of the hit edge are moved onto it, and body
/// vertices this close to the line through their neighbors are dropped.
pub const DEFAULT_FRAGMENT_TOL: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionOptions {
    pub snap_tol: f64,
    pub turn_tol_deg: f64,
    pub fragment_tol: f64,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        Self {
            snap_tol: DEFAULT_SNAP_TOL,
            turn_tol_deg: DEFAULT_TURN_TOL_DEG,
            fragment_tol: DEFAULT_FRAGMENT_TOL,
        }
    }
}

impl PartitionOptions {
    fn merge_tol(&self) -> f64 {
        self.snap_tol.max(self.fragment_tol)
    }
}

#[derive(Debug, Clone, Error)]
pub enum PartitionError {
    #[error("vertex {vertex} is not orthogonalizable (interior angle {angle_deg:.3} deg)")]
    NotOrthogonalizable { vertex: usize, angle_deg: f64 },
    #[error("turn count mismatch: {n_r} R vs {n_l} L (expected n_R - n_L = 4)")]
    TurnCount { n_r: usize, n_l: usize },
    #[error("cut from vertex {origin} rejected: {reason}")]
    CutRejected { origin: usize, reason: &'static str },
    #[error("partition stuck with a {}-vertex body after {} cut(s)", body.len(), quads.len())]
    Stuck { body: Vec<Point>, quads: Vec<Quad> },
    #[error("ring needs at least 4 vertices, got {0}")]
    TooFewVertices(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Turn {
    R,
    L,
}

/// Cyclic right/left turn string, one entry per ring vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RlExpression {
    turns: Vec<Turn>,
}

impl RlExpression {
    pub fn turns(&self) -> &[Turn] {
        &self.turns
    }

    pub fn len(&self) -> usize {
        self.turns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.turns.is_empty()
    }

    pub fn n_r(&self) -> usize {
        self.turns.iter().filter(|&&t| t == Turn::R).count()
    }

    pub fn n_l(&self) -> usize {
        self.turns.len() - self.n_r()
    }

    pub fn l_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.turns.iter().enumerate().filter(|(_, &t)| t == Turn::L).map(|(i, _)| i)
    }

    /// Turn at a cyclic index.
    pub fn at(&self, i: isize) -> Turn {
        let n = self.turns.len() as isize;
        self.turns[i.rem_euclid(n) as usize]
    }
}

impl fmt::Display for RlExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.turns {
            f.write_str(match t {
                Turn::R => "R",
                Turn::L => "L",
            })?;
        }
        Ok(())
    }
}

/// Classifies every vertex of a clockwise ring as a right or left turn.
pub fn rl_expression(ring: &[Point]) -> Result<RlExpression, PartitionError> {
    rl_expression_with(ring, DEFAULT_TURN_TOL_DEG)
}

pub fn rl_expression_with(ring: &[Point], turn_tol_deg: f64) -> Result<RlExpression, PartitionError> {
    let n = ring.len();
    let mut turns = Vec::with_capacity(n);
    for i in 0..n {
        let angle = interior_angle_deg(ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]);
        if (angle - 90.0).abs() <= turn_tol_deg {
            turns.push(Turn::R);
        } else if (angle - 270.0).abs() <= turn_tol_deg {
            turns.push(Turn::L);
        } else {
            return Err(PartitionError::NotOrthogonalizable { vertex: i, angle_deg: angle });
        }
    }
    Ok(RlExpression { turns })
}

/// A maximal run of at least two right turns between left turns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub start_l: usize,
    pub run: Vec<usize>,
    pub end_l: usize,
}

impl Branch {
    pub fn n_r(&self) -> usize {
        self.run.len()
    }
}

pub fn detect_branches(rl: &RlExpression) -> Vec<Branch> {
    let n = rl.len();
    let ls: Vec<usize> = rl.l_vertices().collect();
    let mut out = Vec::new();
    for (i, &start_l) in ls.iter().enumerate() {
        let end_l = ls[(i + 1) % ls.len()];
        let mut run = Vec::new();
        let mut j = (start_l + 1) % n;
        while j != end_l {
            run.push(j);
            j = (j + 1) % n;
        }
        if run.len() >= 2 {
            out.push(Branch { start_l, run, end_l });
        }
    }
    out
}

/// Direction in which a dividing line is drawn from its left vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DlDirection {
    /// Continues the incoming edge, i.e. follows the clockwise numbering.
    Fdl,
    /// Continues the outgoing edge backwards (counter-clockwise).
    Bdl,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DividingLine {
    pub origin: usize,
    pub direction: DlDirection,
    pub start: Point,
    pub endpoint: Point,
    pub hit_edge: usize,
    /// Set when the endpoint was snapped onto an existing vertex.
    pub hit_vertex: Option<usize>,
    pub length: f64,
    pub vertex_reduction: usize,
    pub priority: usize,
}

impl DividingLine {
    /// Same segment regardless of which end it was drawn from.
    pub fn same_segment(&self, other: &DividingLine, tol: f64) -> bool {
        (self.start.distance(other.start) <= tol && self.endpoint.distance(other.endpoint) <= tol)
            || (self.start.distance(other.endpoint) <= tol
                && self.endpoint.distance(other.start) <= tol)
    }

    fn shares_endpoint(&self, other: &DividingLine, tol: f64) -> bool {
        [self.start, self.endpoint]
            .iter()
            .any(|p| p.distance(other.start) <= tol || p.distance(other.endpoint) <= tol)
    }
}

fn idx(i: isize, n: usize) -> usize {
    i.rem_euclid(n as isize) as usize
}

/// Casts a dividing line from left vertex `origin` and intersects it with the
/// nearest edge. Returns `None` when the ray misses or leaves the interior.
pub fn cast_dl(
    ring: &[Point],
    rl: &RlExpression,
    origin: usize,
    direction: DlDirection,
    snap_tol: f64,
) -> Option<DividingLine> {
    let n = ring.len();
    let o = origin as isize;
    let start = ring[origin];
    let dir = match direction {
        DlDirection::Fdl => start - ring[idx(o - 1, n)],
        DlDirection::Bdl => start - ring[idx(o + 1, n)],
    }
    .normalized();
    let mut best: Option<(usize, crate::geometry::RayHit)> = None;
    for j in 0..n {
        // Skip the two edges incident to the origin.
        if j == origin || j == idx(o - 1, n) {
            continue;
        }
        if let Some(hit) = ray_segment(start, dir, ring[j], ring[(j + 1) % n]) {
            if best.is_none_or(|(_, b)| hit.s < b.s) {
                best = Some((j, hit));
            }
        }
    }
    let (hit_edge, hit) = best?;
    let mut endpoint = hit.point;
    let mut hit_vertex = None;
    let near = [hit_edge, (hit_edge + 1) % n]
        .into_iter()
        .min_by(|&a, &b| ring[a].distance(endpoint).total_cmp(&ring[b].distance(endpoint)))
        .expect("two endpoints");
    if ring[near].distance(endpoint) <= snap_tol {
        endpoint = ring[near];
        hit_vertex = Some(near);
    }
    if !point_in_polygon(start.midpoint(endpoint), ring) {
        return None;
    }
    let mut dl = DividingLine {
        origin,
        direction,
        start,
        endpoint,
        hit_edge,
        hit_vertex,
        length: start.distance(endpoint),
        vertex_reduction: 2,
        priority: 0,
    };
    if cuts_one_rectangle(rl, &dl) {
        if let Ok(body) = cut_body(ring, &dl, snap_tol) {
            dl.vertex_reduction = n - body.len();
        }
    }
    Some(dl)
}

/// Both dividing lines from every left vertex, forward first.
pub fn candidate_dls(ring: &[Point], rl: &RlExpression) -> Vec<DividingLine> {
    candidate_dls_with(ring, rl, DEFAULT_FRAGMENT_TOL)
}

pub fn candidate_dls_with(ring: &[Point], rl: &RlExpression, snap_tol: f64) -> Vec<DividingLine> {
    rl.l_vertices()
        .flat_map(|l| {
            [DlDirection::Fdl, DlDirection::Bdl]
                .into_iter()
                .filter_map(move |d| cast_dl(ring, rl, l, d, snap_tol))
        })
        .collect()
}

/// Dividing lines from the two left vertices bounding a branch.
pub fn branch_dls(ring: &[Point], rl: &RlExpression, branch: &Branch) -> Vec<DividingLine> {
    let mut origins = vec![branch.start_l];
    if branch.end_l != branch.start_l {
        origins.push(branch.end_l);
    }
    origins
        .into_iter()
        .flat_map(|l| {
            [DlDirection::Fdl, DlDirection::Bdl]
                .into_iter()
                .filter_map(move |d| cast_dl(ring, rl, l, d, DEFAULT_FRAGMENT_TOL))
        })
        .collect()
}

/// The three vertices erased by the cut, in ring order.
fn swept_vertices(n: usize, dl: &DividingLine) -> [usize; 3] {
    let k = dl.origin as isize;
    match dl.direction {
        DlDirection::Fdl => [idx(k, n), idx(k + 1, n), idx(k + 2, n)],
        DlDirection::Bdl => [idx(k - 2, n), idx(k - 1, n), idx(k, n)],
    }
}

fn cuts_one_rectangle(rl: &RlExpression, dl: &DividingLine) -> bool {
    let n = rl.len();
    if n < 6 {
        return false;
    }
    let k = dl.origin as isize;
    let (a, b, edge, far) = match dl.direction {
        DlDirection::Fdl => (k + 1, k + 2, idx(k + 2, n), idx(k + 3, n)),
        DlDirection::Bdl => (k - 1, k - 2, idx(k - 3, n), idx(k - 3, n)),
    };
    rl.at(a) == Turn::R
        && rl.at(b) == Turn::R
        && (dl.hit_edge == edge || dl.hit_vertex == Some(far))
}

fn quad_vertices(ring: &[Point], dl: &DividingLine) -> [Point; 4] {
    let [a, b, c] = swept_vertices(ring.len(), dl);
    match dl.direction {
        DlDirection::Fdl => [ring[a], ring[b], ring[c], dl.endpoint],
        DlDirection::Bdl => [dl.endpoint, ring[a], ring[b], ring[c]],
    }
}

/// Remaining body after the cut, with straight-through vertices removed.
fn cut_body(ring: &[Point], dl: &DividingLine, snap_tol: f64) -> Result<Vec<Point>, PartitionError> {
    let n = ring.len();
    let erased = swept_vertices(n, dl);
    let k = dl.origin as isize;
    // The endpoint is inserted after this surviving vertex unless it already
    // coincides with the next one.
    let (insert_after, far) = match dl.direction {
        DlDirection::Fdl => (idx(k - 1, n), idx(k + 3, n)),
        DlDirection::Bdl => (idx(k - 3, n), idx(k - 3, n)),
    };
    let snapped = dl.hit_vertex == Some(far);
    let mut body = Vec::with_capacity(n);
    for i in 0..n {
        if erased.contains(&i) {
            continue;
        }
        body.push(ring[i]);
        if i == insert_after && !snapped {
            body.push(dl.endpoint);
        }
    }
    drop_straight_vertices(&mut body, snap_tol);
    if body.len() < 4 {
        return Err(PartitionError::CutRejected { origin: dl.origin, reason: "body collapsed" });
    }
    Ok(body)
}

fn drop_straight_vertices(ring: &mut Vec<Point>, tol: f64) {
    loop {
        let n = ring.len();
        if n < 4 {
            return;
        }
        let straight = (0..n).find(|&i| {
            let (p, c, q) = (ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]);
            (c - p).dot(q - c) > 0.0 && point_line_distance(c, p, q) <= tol
        });
        match straight {
            Some(i) => {
                ring.remove(i);
            }
            None => return,
        }
    }
}

/// True when a vertex comes within `tol` of an edge that is neither incident
/// to it nor next to an incident edge.
pub fn has_pinch(ring: &[Point], tol: f64) -> bool {
    let n = ring.len();
    if tol <= 0.0 || n < 6 {
        return false;
    }
    (0..n).any(|i| {
        (0..n).any(|j| {
            let gap = (j + n - i) % n;
            // Edge j runs from j to j + 1; skip edges i-2 .. i+1.
            if gap <= 1 || gap >= n - 2 {
                return false;
            }
            crate::geometry::point_segment_distance(ring[i], ring[j], ring[(j + 1) % n]) < tol
        })
    })
}

/// Perpendicular distance from the dividing line's midpoint, away from the
/// part it would cut off, to the nearest edge of the ring.
pub fn main_roof_width(ring: &[Point], dl: &DividingLine) -> Option<f64> {
    let n = ring.len();
    let k = dl.origin as isize;
    let cut_side = match dl.direction {
        DlDirection::Fdl => ring[idx(k + 1, n)],
        DlDirection::Bdl => ring[idx(k - 1, n)],
    };
    let along = (dl.endpoint - dl.start).normalized();
    let mut normal = along.perp_ccw();
    if normal.dot(cut_side - dl.start) > 0.0 {
        normal = -normal;
    }
    let mid = dl.start.midpoint(dl.endpoint);
    (0..n)
        .filter_map(|j| ray_segment(mid, normal, ring[j], ring[(j + 1) % n]))
        .map(|h| h.s)
        .min_by(f64::total_cmp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConditionReport {
    pub cuts_one_rectangle: bool,
    pub shorter_than_main_roof: bool,
    pub vertices_unshared: bool,
}

impl ConditionReport {
    pub fn passes_all(&self) -> bool {
        self.cuts_one_rectangle && self.shorter_than_main_roof && self.vertices_unshared
    }
}

/// Evaluates the three selection conditions for `dl` among `all_dls`.
pub fn check_dl_conditions(
    ring: &[Point],
    rl: &RlExpression,
    dl: &DividingLine,
    all_dls: &[DividingLine],
) -> ConditionReport {
    let firsts: Vec<(bool, bool)> =
        all_dls.iter().map(|d| first_two_conditions(ring, rl, d, DEFAULT_SNAP_TOL)).collect();
    let (c1, c2) = first_two_conditions(ring, rl, dl, DEFAULT_SNAP_TOL);
    ConditionReport {
        cuts_one_rectangle: c1,
        shorter_than_main_roof: c2,
        vertices_unshared: unshared(dl, all_dls, &firsts, DEFAULT_SNAP_TOL),
    }
}

/// Condition reports for every dividing line of a candidate set.
pub fn evaluate_conditions(
    ring: &[Point],
    rl: &RlExpression,
    dls: &[DividingLine],
    snap_tol: f64,
) -> Vec<ConditionReport> {
    let firsts: Vec<(bool, bool)> =
        dls.iter().map(|d| first_two_conditions(ring, rl, d, snap_tol)).collect();
    dls.iter()
        .zip(&firsts)
        .map(|(d, &(c1, c2))| ConditionReport {
            cuts_one_rectangle: c1,
            shorter_than_main_roof: c2,
            vertices_unshared: unshared(d, dls, &firsts, snap_tol),
        })
        .collect()
}

fn first_two_conditions(
    ring: &[Point],
    rl: &RlExpression,
    dl: &DividingLine,
    tol: f64,
) -> (bool, bool) {
    let c1 = cuts_one_rectangle(rl, dl);
    let c2 = main_roof_width(ring, dl).is_some_and(|w| dl.length <= w + tol);
    (c1, c2)
}

/// Fails when another line meeting the first two conditions shares an
/// endpoint and is strictly shorter. Duplicates of the same segment drawn
/// from its other end do not count.
fn unshared(dl: &DividingLine, all: &[DividingLine], firsts: &[(bool, bool)], tol: f64) -> bool {
    !all.iter().zip(firsts).any(|(other, &(c1, c2))| {
        c1 && c2
            && !other.same_segment(dl, tol)
            && other.shares_endpoint(dl, tol)
            && other.length < dl.length - tol
    })
}

/// Orders dividing lines for execution: larger vertex reduction first, then
/// shorter, then lower origin index, forward before backward.
pub fn prioritize(mut dls: Vec<DividingLine>) -> Vec<DividingLine> {
    dls.sort_by(|a, b| {
        b.vertex_reduction
            .cmp(&a.vertex_reduction)
            .then(a.length.total_cmp(&b.length))
            .then(a.origin.cmp(&b.origin))
            .then(a.direction.cmp(&b.direction))
    });
    for (i, d) in dls.iter_mut().enumerate() {
        d.priority = i;
    }
    dls
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DividingPattern {
    Fdl,
    Bdl,
    Body,
}

impl From<DlDirection> for DividingPattern {
    fn from(d: DlDirection) -> Self {
        match d {
            DlDirection::Fdl => DividingPattern::Fdl,
            DlDirection::Bdl => DividingPattern::Bdl,
        }
    }
}

/// Where a quad attaches to the rest of the layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub quad: usize,
    pub edge: usize,
    /// Own vertex index used as the generatrix.
    pub mutual_vertex: usize,
}

/// A partitioned quadrilateral, before and after rectification.
#[derive(Debug, Clone, PartialEq)]
pub struct Quad {
    pub id: usize,
    pub verts_pre: [Point; 4],
    pub verts_post: Option<[Point; 4]>,
    pub pattern: DividingPattern,
    /// Edge `i` runs from vertex `i` to vertex `i + 1`.
    pub active_edge: Option<usize>,
    pub neighbor: Option<Neighbor>,
}

impl Quad {
    pub fn area_pre(&self) -> f64 {
        signed_area(&self.verts_pre).abs()
    }

    pub fn edge_pre(&self, e: usize) -> (Point, Point) {
        (self.verts_pre[e % 4], self.verts_pre[(e + 1) % 4])
    }
}

/// Cuts the quad described by `dl` off `ring`.
///
/// The dividing line becomes edge 3 of the quad for both patterns.
pub fn execute_cut(
    ring: &[Point],
    rl: &RlExpression,
    dl: &DividingLine,
    id: usize,
) -> Result<(Quad, Vec<Point>), PartitionError> {
    execute_cut_with(ring, rl, dl, id, DEFAULT_FRAGMENT_TOL)
}

pub fn execute_cut_with(
    ring: &[Point],
    rl: &RlExpression,
    dl: &DividingLine,
    id: usize,
    snap_tol: f64,
) -> Result<(Quad, Vec<Point>), PartitionError> {
    let reject = |reason| PartitionError::CutRejected { origin: dl.origin, reason };
    if !cuts_one_rectangle(rl, dl) {
        return Err(reject("does not cut off a single quadrilateral"));
    }
    let verts = quad_vertices(ring, dl);
    if !is_simple(&verts) || signed_area(&verts) >= 0.0 {
        return Err(reject("cut-off quad is not a clockwise simple quadrilateral"));
    }
    let body = cut_body(ring, dl, snap_tol)?;
    let reduction = ring.len() - body.len();
    if !reduction.is_multiple_of(2) {
        return Err(reject("odd vertex reduction"));
    }
    if !is_simple(&body) || signed_area(&body) >= 0.0 {
        return Err(reject("remaining body is not simple"));
    }
    let quad = Quad {
        id,
        verts_pre: verts,
        verts_post: None,
        pattern: dl.direction.into(),
        active_edge: Some(3),
        neighbor: None,
    };
    Ok((quad, body))
}

/// Candidates and the executed line of one partition step, kept for
/// diagnostics and debug drawings.
#[derive(Debug, Clone)]
pub struct CutTrace {
    pub body_before: Vec<Point>,
    pub rl: RlExpression,
    pub candidates: Vec<DividingLine>,
    pub chosen: DividingLine,
}

#[derive(Debug, Clone)]
pub struct PartitionResult {
    /// Quads in cut order; the body is last.
    pub quads: Vec<Quad>,
    pub cut_count: usize,
    pub trace: Vec<CutTrace>,
}

impl PartitionResult {
    pub fn body(&self) -> &Quad {
        self.quads.last().expect("partition always has a body quad")
    }
}

pub fn partition(ring: &[Point]) -> Result<PartitionResult, PartitionError> {
    partition_with(ring, &PartitionOptions::default())
}

/// Repeats encode, rank and cut until the body has four vertices.
pub fn partition_with(
    ring: &[Point],
    opts: &PartitionOptions,
) -> Result<PartitionResult, PartitionError> {
    if ring.len() < 4 {
        return Err(PartitionError::TooFewVertices(ring.len()));
    }
    let mut body = ring.to_vec();
    let mut quads = Vec::new();
    let mut trace = Vec::new();
    while body.len() > 4 {
        let rl = rl_expression_with(&body, opts.turn_tol_deg)?;
        let (n_r, n_l) = (rl.n_r(), rl.n_l());
        if n_r != n_l + 4 {
            return Err(PartitionError::TurnCount { n_r, n_l });
        }
        let candidates = candidate_dls_with(&body, &rl, opts.merge_tol());
        let reports = evaluate_conditions(&body, &rl, &candidates, opts.snap_tol);
        let pick = |keep: &dyn Fn(&ConditionReport) -> bool| {
            let set = candidates
                .iter()
                .zip(&reports)
                .filter(|(_, r)| keep(r))
                .map(|(d, _)| d.clone())
                .collect();
            prioritize(set)
        };
        // Lines meeting every condition go first. If none of them can be
        // executed, any single-rectangle cut still makes progress.
        let mut ranked = pick(&|r| r.passes_all());
        ranked.extend(pick(&|r| r.cuts_one_rectangle && !r.passes_all()));
        let mut executable = Vec::new();
        for dl in ranked {
            match execute_cut_with(&body, &rl, &dl, quads.len(), opts.merge_tol()) {
                Ok((quad, rest)) => executable.push((dl, quad, rest)),
                Err(e) => log::debug!("{e}"),
            }
        }
        // A body pinched to a thin neck tends to strand later cuts.
        let unpinched = executable.iter().position(|(_, _, rest)| !has_pinch(rest, opts.fragment_tol));
        let executed = match unpinched {
            Some(i) => Some(executable.swap_remove(i)),
            None => executable.into_iter().next(),
        };
        let Some((chosen, quad, rest)) = executed else {
            return Err(PartitionError::Stuck { body, quads });
        };
        trace.push(CutTrace { body_before: body, rl, candidates, chosen });
        quads.push(quad);
        body = rest;
    }
    let verts: [Point; 4] = [body[0], body[1], body[2], body[3]];
    let rl = rl_expression_with(&body, opts.turn_tol_deg)?;
    if rl.n_r() != 4 {
        return Err(PartitionError::TurnCount { n_r: rl.n_r(), n_l: rl.n_l() });
    }
    let cut_count = quads.len();
    quads.push(Quad {
        id: cut_count,
        verts_pre: verts,
        verts_post: None,
        pattern: DividingPattern::Body,
        active_edge: None,
        neighbor: None,
    });
    Ok(PartitionResult { quads, cut_count, trace })
}
