//! Flat, gable and hipped roofs over one oriented rectangle.
//!
//! Plan frame: `a` runs along edge12 (the ridge axis), `c` runs from edge12
//! towards edge34. Sloped boards are thin prisms whose upper surface sits
//! `rf_offs` above the nominal roof plane measured perpendicular to it.

use super::mesh::{extrude, loft, P3};
use super::{ModelError, PlaneKind, RoofParams, RoofPlane, Solid, SolidKind};
use crate::geometry::Point;
use crate::rectify::OrientedQuad;

/// Quantities shared by the gable construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoofQuantities {
    pub st_heit: f64,
    pub side23l: f64,
    pub wid_rfb: f64,
    pub ratio_s: f64,
    pub cp_rf1: Point,
    pub cp_rf2: Point,
    /// Height of the board base centers.
    pub hei_rf: f64,
    /// Height of the boards' upper ridge edge.
    pub ridge_height: f64,
}

fn roof_error(reason: impl Into<String>) -> ModelError {
    ModelError::RoofParameter { rect: 0, reason: reason.into() }
}

pub fn derived_roof_quantities(
    rect: &OrientedQuad,
    p: &RoofParams,
    stories: u32,
) -> Result<RoofQuantities, ModelError> {
    let t = p.theta_slope;
    let ws = rect.w_s;
    let st_heit = p.start_height(stories);
    let side23l = 0.5 * ws * (1.0 + t.tan().powi(2)).sqrt();
    let wid_rfb = side23l + p.eaves23 + p.rf_offs * t.tan();
    let ratio_s = 0.25 - 0.5 * (p.eaves23 * t.cos() + p.rf_offs * t.sin()) / ws
        + p.thick_rf * t.sin() / ws;
    if !(ratio_s > 0.0 && ratio_s < 0.5) {
        return Err(roof_error(format!(
            "ratio_s = {ratio_s:.4} outside (0, 0.5); eaves or offset too large for w_S = {ws:.3}"
        )));
    }
    let [p1, p2, p3, p4] = rect.pts;
    let pt12 = p1.midpoint(p2);
    let pt34 = p3.midpoint(p4);
    let cp_rf1 = pt12 * (1.0 - ratio_s) + pt34 * ratio_s;
    let cp_rf2 = pt12 * ratio_s + pt34 * (1.0 - ratio_s);
    let ridge_height = st_heit + 0.5 * ws * t.tan() + p.rf_offs / t.cos();
    let hei_rf = ridge_height - 0.5 * wid_rfb * t.sin() - p.thick_rf * t.cos();
    Ok(RoofQuantities { st_heit, side23l, wid_rfb, ratio_s, cp_rf1, cp_rf2, hei_rf, ridge_height })
}

fn p3(p: Point, z: f64) -> P3 {
    P3::new(p.x, p.y, z)
}

fn plan(p: P3) -> Point {
    Point::new(p.x, p.y)
}

fn frame(rect: &OrientedQuad) -> (Point, Point, Point) {
    let [p1, p2, p3, _] = rect.pts;
    let a = (p2 - p1).normalized();
    let c = (p3 - p2).normalized();
    let center = p1.midpoint(p3);
    (center, a, c)
}

pub fn build_flat_roof(rect: &OrientedQuad, p: &RoofParams, stories: u32, material: &str) -> Solid {
    let (center, a, c) = frame(rect);
    let hw = 0.5 * rect.w_l + p.eaves12;
    let hs = 0.5 * rect.w_s + p.eaves23;
    let outline = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
        .map(|(u, v)| center + a * (u * hw) + c * (v * hs));
    let z = p.start_height(stories);
    let base: Vec<P3> = outline.iter().map(|&q| p3(q, z)).collect();
    Solid {
        kind: SolidKind::FlatRoof,
        rect: 0,
        mesh: extrude(&base, P3::new(0.0, 0.0, p.thick_rf)),
        material: material.to_string(),
        roof_plane: Some(RoofPlane { rect: 0, kind: PlaneKind::Flat, slope: 0.0, plan: outline.to_vec() }),
    }
}

/// Two sloped boards meeting at the ridge plus the two gable-end triangles.
pub fn build_gable_roof(
    rect: &OrientedQuad,
    p: &RoofParams,
    stories: u32,
    roof_material: &str,
    wall_material: &str,
) -> Result<Vec<Solid>, ModelError> {
    let q = derived_roof_quantities(rect, p, stories)?;
    let t = p.theta_slope;
    let (_, a, c) = frame(rect);
    let length = rect.w_l + 2.0 * p.eaves12;
    let mut solids = Vec::with_capacity(4);
    for (cp, b) in [(q.cp_rf1, -c), (q.cp_rf2, c)] {
        // Down-slope direction and upward normal of the board.
        let down = P3::new(b.x * t.cos(), b.y * t.cos(), -t.sin());
        let up = P3::new(b.x * t.sin(), b.y * t.sin(), t.cos());
        let along = P3::new(a.x, a.y, 0.0);
        let base_center = p3(cp, q.hei_rf);
        let corners = |origin: P3| -> Vec<P3> {
            [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
                .iter()
                .map(|&(u, v)| origin + along * (0.5 * length * u) + down * (0.5 * q.wid_rfb * v))
                .collect()
        };
        let base = corners(base_center);
        let top = corners(base_center + up * p.thick_rf);
        solids.push(Solid {
            kind: SolidKind::GableBoard,
            rect: 0,
            mesh: extrude(&base, up * p.thick_rf),
            material: roof_material.to_string(),
            roof_plane: Some(RoofPlane {
                rect: 0,
                kind: PlaneKind::Gable,
                slope: t,
                plan: top.into_iter().map(plan).collect(),
            }),
        });
    }
    let rise = 0.5 * rect.w_s * t.tan();
    if rise > 1e-9 {
        let depth = p.thick_rf.min(0.5 * rect.w_l);
        let [p1, p2, p3_, p4] = rect.pts;
        // Each end triangle stands on a short wall and is thickened inwards.
        for (from, to, inward) in [(p2, p3_, -a), (p4, p1, a)] {
            let apex = from.midpoint(to);
            let tri = vec![p3(from, q.st_heit), p3(to, q.st_heit), p3(apex, q.st_heit + rise)];
            solids.push(Solid {
                kind: SolidKind::GableEnd,
                rect: 0,
                mesh: extrude(&tri, P3::new(inward.x, inward.y, 0.0) * depth),
                material: wall_material.to_string(),
                roof_plane: None,
            });
        }
    }
    Ok(solids)
}

/// Two trapezoidal and two triangular boards at equal slope.
pub fn build_hipped_roof(
    rect: &OrientedQuad,
    p: &RoofParams,
    stories: u32,
    material: &str,
) -> Result<Vec<Solid>, ModelError> {
    let t = p.theta_slope;
    let (center, a, c) = frame(rect);
    let w = rect.w_l + 2.0 * p.eaves12;
    let s = rect.w_s + 2.0 * p.eaves23;
    let ridge = w - s;
    if ridge < -1e-9 {
        return Err(roof_error(format!("negative ridge length {ridge:.4}")));
    }
    let ridge = ridge.max(0.0);
    let (hw, hs, hr) = (0.5 * w, 0.5 * s, 0.5 * ridge);
    let at = |u: f64, v: f64| center + a * u + c * v;
    let z_eave = p.start_height(stories) - p.eaves23 * t.tan() + p.rf_offs / t.cos();
    let drop = p.thick_rf / t.cos();
    // Height of a plan point above the eave line on each plane.
    let rise = |d: f64| z_eave + d * t.tan();
    let mut planes: Vec<(PlaneKind, Vec<(f64, f64)>, Box<dyn Fn(f64, f64) -> f64>)> = Vec::new();
    let ridge_pts = |v: f64| -> Vec<(f64, f64)> {
        if hr > 1e-9 { vec![(hr, v), (-hr, v)] } else { vec![(0.0, v)] }
    };
    let mut side1 = vec![(-hw, -hs), (hw, -hs)];
    side1.extend(ridge_pts(0.0));
    planes.push((kind_for(hr), side1, Box::new(move |_, v| v + hs)));
    let mut side2 = vec![(hw, hs), (-hw, hs)];
    side2.extend(ridge_pts(0.0).into_iter().rev());
    planes.push((kind_for(hr), side2, Box::new(move |_, v| hs - v)));
    planes.push((PlaneKind::HipTriangle, vec![(hw, -hs), (hw, hs), (hr, 0.0)], Box::new(move |u, _| hw - u)));
    planes.push((PlaneKind::HipTriangle, vec![(-hw, hs), (-hw, -hs), (-hr, 0.0)], Box::new(move |u, _| u + hw)));
    let solids = planes
        .into_iter()
        .map(|(kind, uv, dist)| {
            let top: Vec<P3> = uv.iter().map(|&(u, v)| p3(at(u, v), rise(dist(u, v)))).collect();
            let bottom: Vec<P3> = top.iter().map(|&q| q - P3::new(0.0, 0.0, drop)).collect();
            Solid {
                kind: SolidKind::HipBoard,
                rect: 0,
                mesh: loft(&bottom, &top),
                material: material.to_string(),
                roof_plane: Some(RoofPlane {
                    rect: 0,
                    kind,
                    slope: t,
                    plan: uv.iter().map(|&(u, v)| at(u, v)).collect(),
                }),
            }
        })
        .collect();
    Ok(solids)
}

fn kind_for(half_ridge: f64) -> PlaneKind {
    if half_ridge > 1e-9 { PlaneKind::HipTrapezoid } else { PlaneKind::HipTriangle }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rectify::{number_quad, MainAngle};

    fn rect(w: f64, s: f64) -> OrientedQuad {
        let q = [Point::new(0., 0.), Point::new(0., s), Point::new(w, s), Point::new(w, 0.)];
        number_quad(&q, &MainAngle { theta: 0.0, bin_support: 0.0 }).unwrap()
    }

    fn bare(theta_deg: f64) -> RoofParams {
        RoofParams {
            theta_slope: theta_deg.to_radians(),
            eaves23: 0.0,
            eaves12: 0.0,
            rf_offs: 0.0,
            thick_rf: 1e-12,
            floor_height: 3.0,
        }
    }

    #[test]
    fn quarter_ratio_without_corrections() {
        let q = derived_roof_quantities(&rect(10., 6.), &bare(30.), 1).unwrap();
        assert!((q.ratio_s - 0.25).abs() < 1e-12);
    }

    #[test]
    fn board_width_at_thirty_degrees() {
        let p = RoofParams { eaves23: 0.5, rf_offs: 0.1, ..bare(30.) };
        let q = derived_roof_quantities(&rect(10., 6.), &p, 1).unwrap();
        assert!((q.side23l - 3.4641).abs() < 1e-4);
        assert!((q.wid_rfb - 4.0218).abs() < 1e-4);
    }

    #[test]
    fn start_height_scales_with_stories() {
        let q = derived_roof_quantities(&rect(10., 6.), &bare(30.), 2).unwrap();
        assert_eq!(q.st_heit, 6.0);
    }

    #[test]
    fn oversized_eaves_are_rejected() {
        let p = RoofParams { eaves23: 3.0, ..bare(30.) };
        assert!(derived_roof_quantities(&rect(10., 2.), &p, 1).is_err());
    }

    #[test]
    fn gable_boards_meet_at_ridge() {
        let r = rect(10., 6.);
        let p = RoofParams { eaves23: 0.4, eaves12: 0.3, rf_offs: 0.05, thick_rf: 0.15, ..bare(30.) };
        let solids = build_gable_roof(&r, &p, 1, "tile", "brick").unwrap();
        assert_eq!(solids.len(), 4);
        let q = derived_roof_quantities(&r, &p, 1).unwrap();
        for s in &solids[..2] {
            assert!(s.mesh.is_watertight());
            let top = s.mesh.bbox().1.z;
            assert!((top - q.ridge_height).abs() < 1e-9);
            // Upper ridge edge lies on the centre line y = 3.
            let ridge: Vec<_> =
                s.mesh.vertices.iter().filter(|v| (v.z - q.ridge_height).abs() < 1e-9).collect();
            assert_eq!(ridge.len(), 2);
            assert!(ridge.iter().all(|v| (v.y - 3.0).abs() < 1e-9), "{ridge:?}");
        }
        for s in &solids[2..] {
            assert!(s.mesh.is_watertight());
        }
    }

    #[test]
    fn gable_plan_tiles_footprint_without_overhangs() {
        let solids = build_gable_roof(&rect(10., 6.), &bare(30.), 1, "t", "w").unwrap();
        let total: f64 = solids.iter().filter_map(|s| s.roof_plane.as_ref()).map(|p| p.plan_area()).sum();
        assert!((total - 60.0).abs() < 1e-9);
    }

    #[test]
    fn hipped_planes_and_pyramid() {
        let solids = build_hipped_roof(&rect(10., 6.), &bare(30.), 1, "slate").unwrap();
        let mut areas: Vec<f64> = solids.iter().map(|s| s.roof_plane.as_ref().unwrap().plan_area()).collect();
        areas.sort_by(f64::total_cmp);
        for (got, want) in areas.iter().zip([9.0, 9.0, 21.0, 21.0]) {
            assert!((got - want).abs() < 1e-9);
        }
        assert!(solids.iter().all(|s| s.mesh.is_watertight()));

        let pyramid = build_hipped_roof(&rect(6., 6.), &bare(30.), 1, "slate").unwrap();
        assert!(pyramid.iter().all(|s| s.roof_plane.as_ref().unwrap().kind == PlaneKind::HipTriangle));
        assert!(pyramid.iter().all(|s| (s.roof_plane.as_ref().unwrap().plan_area() - 9.0).abs() < 1e-9));
        assert!(pyramid.iter().all(|s| s.mesh.is_watertight()));
    }

    #[test]
    fn flat_slab_with_eaves() {
        let p = RoofParams { eaves12: 0.3, eaves23: 0.3, thick_rf: 0.2, ..bare(0.) };
        let s = build_flat_roof(&rect(5., 2.), &p, 3, "metal");
        let (lo, hi) = s.mesh.bbox();
        assert!((hi.x - lo.x - 5.6).abs() < 1e-12 && (hi.y - lo.y - 2.6).abs() < 1e-12);
        assert!((lo.z - 9.0).abs() < 1e-12 && (hi.z - 9.2).abs() < 1e-12);
    }
}
