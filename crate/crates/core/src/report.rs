//! Roof plane areas and per-building roof damage records.

use std::fmt::Write as _;

use geo::{unary_union, Area, BooleanOps, Coord, LineString, MultiPolygon, Polygon};
use serde::Serialize;

use crate::geometry::{is_simple, signed_area, Point};
use crate::modelgen::{BuildingModel, PlaneKind};

pub const CSV_HEADER: &str =
    "building_id,footprint_area,plan_roof_area,true_roof_area,damaged_plan_area,damaged_true_area,damage_fraction";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneArea {
    /// Index into the model's roof planes.
    pub plane: usize,
    pub rect: usize,
    pub kind: PlaneKind,
    pub plan_area: f64,
    pub true_area: f64,
    pub slope: f64,
}

pub fn roof_plane_areas(model: &BuildingModel) -> Vec<PlaneArea> {
    model
        .roof_planes
        .iter()
        .enumerate()
        .map(|(plane, rp)| PlaneArea {
            plane,
            rect: rp.rect,
            kind: rp.kind,
            plan_area: rp.plan_area(),
            true_area: rp.true_area(),
            slope: rp.slope,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DamageRecord {
    pub building_id: String,
    pub footprint_area: f64,
    pub plan_roof_area: f64,
    pub true_roof_area: f64,
    pub damaged_plan_area: f64,
    pub damaged_true_area: f64,
    pub damage_fraction: f64,
}

/// Damage regions merged into one plan-space area.
#[derive(Debug, Clone)]
pub struct DamageMap {
    union: MultiPolygon<f64>,
    /// Regions that were rejected, as `(index, reason)`.
    pub skipped: Vec<(usize, String)>,
}

fn to_polygon(ring: &[Point]) -> Polygon<f64> {
    let coords: Vec<Coord<f64>> = ring.iter().map(|p| Coord { x: p.x, y: p.y }).collect();
    Polygon::new(LineString::from(coords), vec![])
}

impl Default for DamageMap {
    fn default() -> Self {
        Self { union: MultiPolygon::new(vec![]), skipped: Vec::new() }
    }
}

impl DamageMap {
    /// Unions the valid regions. Rings with fewer than three vertices,
    /// non-finite coordinates, zero area or self-intersections are skipped.
    pub fn new(regions: &[Vec<Point>]) -> Self {
        let mut skipped = Vec::new();
        let mut polys = Vec::new();
        for (i, ring) in regions.iter().enumerate() {
            let reason = if ring.len() < 3 {
                Some("fewer than 3 vertices")
            } else if ring.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
                Some("non-finite coordinate")
            } else if !is_simple(ring) {
                Some("not simple")
            } else if signed_area(ring) == 0.0 {
                Some("zero area")
            } else {
                None
            };
            match reason {
                Some(r) => skipped.push((i, r.to_string())),
                None => polys.push(to_polygon(ring)),
            }
        }
        Self { union: unary_union(&polys), skipped }
    }

    pub fn is_empty(&self) -> bool {
        self.union.0.is_empty()
    }

    /// Area of `plan` covered by damage.
    pub fn covered_area(&self, plan: &[Point]) -> f64 {
        if self.is_empty() || plan.len() < 3 {
            return 0.0;
        }
        to_polygon(plan).intersection(&self.union).unsigned_area()
    }
}

pub fn damage_assess(model: &BuildingModel, damage: &DamageMap) -> DamageRecord {
    let mut rec = DamageRecord {
        building_id: model.id.clone(),
        footprint_area: model.footprint_area,
        plan_roof_area: 0.0,
        true_roof_area: 0.0,
        damaged_plan_area: 0.0,
        damaged_true_area: 0.0,
        damage_fraction: 0.0,
    };
    for rp in &model.roof_planes {
        let plan = rp.plan_area();
        let hit = damage.covered_area(&rp.plan).min(plan);
        let c = rp.slope.cos();
        rec.plan_roof_area += plan;
        rec.true_roof_area += plan / c;
        rec.damaged_plan_area += hit;
        rec.damaged_true_area += hit / c;
    }
    if rec.true_roof_area > 0.0 {
        rec.damage_fraction = (rec.damaged_true_area / rec.true_roof_area).clamp(0.0, 1.0);
    }
    rec
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

fn round3(v: f64) -> f64 {
    let r = (v * 1000.0).round() / 1000.0;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Renders records in input order with three decimals.
pub fn emit_report(records: &[DamageRecord], format: ReportFormat) -> String {
    let rounded = records.iter().map(|r| DamageRecord {
        building_id: r.building_id.clone(),
        footprint_area: round3(r.footprint_area),
        plan_roof_area: round3(r.plan_roof_area),
        true_roof_area: round3(r.true_roof_area),
        damaged_plan_area: round3(r.damaged_plan_area),
        damaged_true_area: round3(r.damaged_true_area),
        damage_fraction: round3(r.damage_fraction),
    });
    match format {
        ReportFormat::Csv => {
            let mut out = format!("{CSV_HEADER}\n");
            for r in rounded {
                let _ = writeln!(
                    out,
                    "{},{:.3},{:.3},{:.3},{:.3},{:.3},{:.3}",
                    csv_field(&r.building_id),
                    r.footprint_area,
                    r.plan_roof_area,
                    r.true_roof_area,
                    r.damaged_plan_area,
                    r.damaged_true_area,
                    r.damage_fraction
                );
            }
            out
        }
        ReportFormat::Json => {
            let v: Vec<DamageRecord> = rounded.collect();
            let mut s = serde_json::to_string_pretty(&v).expect("records serialize");
            s.push('\n');
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelgen::RoofPlane;

    fn ring(pts: &[(f64, f64)]) -> Vec<Point> {
        pts.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    fn flat_model(w: f64, h: f64) -> BuildingModel {
        BuildingModel {
            id: "b".into(),
            solids: vec![],
            footprint_area: w * h,
            roof_planes: vec![RoofPlane {
                rect: 0,
                kind: PlaneKind::Flat,
                slope: 0.0,
                plan: ring(&[(0., 0.), (0., h), (w, h), (w, 0.)]),
            }],
            openings: vec![],
            diagnostics: vec![],
        }
    }

    #[test]
    fn half_covered_flat_roof() {
        let m = flat_model(5.0, 2.0);
        let d = DamageMap::new(&[ring(&[(-1., -1.), (-1., 3.), (2.5, 3.), (2.5, -1.)])]);
        let r = damage_assess(&m, &d);
        assert!((r.damaged_true_area - 5.0).abs() < 1e-9);
        assert!((r.damage_fraction - 0.5).abs() < 1e-12);
    }

    #[test]
    fn full_and_no_cover() {
        let m = flat_model(5.0, 2.0);
        let all = DamageMap::new(&[ring(&[(-1., -1.), (-1., 3.), (6., 3.), (6., -1.)])]);
        assert_eq!(damage_assess(&m, &all).damage_fraction, 1.0);
        let none = DamageMap::new(&[ring(&[(10., 10.), (10., 11.), (11., 11.), (11., 10.)])]);
        assert_eq!(damage_assess(&m, &none).damage_fraction, 0.0);
        assert_eq!(damage_assess(&m, &DamageMap::default()).damage_fraction, 0.0);
    }

    #[test]
    fn overlapping_regions_are_not_double_counted() {
        let m = flat_model(5.0, 2.0);
        let a = ring(&[(0., 0.), (0., 2.), (3., 2.), (3., 0.)]);
        let b = ring(&[(2., 0.), (2., 2.), (4., 2.), (4., 0.)]);
        let r = damage_assess(&m, &DamageMap::new(&[a, b]));
        assert!((r.damaged_plan_area - 8.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_regions_are_skipped() {
        let bowtie = ring(&[(0., 0.), (1., 1.), (1., 0.), (0., 1.)]);
        let d = DamageMap::new(&[bowtie, ring(&[(0., 0.), (1., 1.)])]);
        assert!(d.is_empty());
        assert_eq!(d.skipped.len(), 2);
        assert_eq!(d.skipped[0].1, "not simple");
    }

    #[test]
    fn sloped_plane_is_slope_corrected() {
        let mut m = flat_model(4.0, 1.0);
        m.roof_planes[0].slope = 60f64.to_radians();
        let a = roof_plane_areas(&m);
        assert!((a[0].true_area - 8.0).abs() < 1e-12);
        let r = damage_assess(&m, &DamageMap::new(&[ring(&[(0., 0.), (0., 1.), (1., 1.), (1., 0.)])]));
        assert!((r.damaged_true_area - 2.0).abs() < 1e-9);
        assert!((r.true_roof_area - r.plan_roof_area / 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_csv_is_header_only() {
        assert_eq!(emit_report(&[], ReportFormat::Csv), format!("{CSV_HEADER}\n"));
        assert_eq!(emit_report(&[], ReportFormat::Json), "[]\n");
    }

    #[test]
    fn csv_and_json_agree() {
        let m = flat_model(5.0, 2.0);
        let d = DamageMap::new(&[ring(&[(0., 0.), (0., 2.), (1.23456, 2.), (1.23456, 0.)])]);
        let rec = damage_assess(&m, &d);
        let csv = emit_report(std::slice::from_ref(&rec), ReportFormat::Csv);
        let json: serde_json::Value = serde_json::from_str(&emit_report(&[rec], ReportFormat::Json)).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        let names: Vec<&str> = lines[0].split(',').collect();
        let values: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(json[0]["building_id"], values[0]);
        for (name, v) in names.iter().zip(&values).skip(1) {
            assert_eq!(json[0][*name].as_f64().unwrap(), v.parse::<f64>().unwrap(), "{name}");
        }
    }

    #[test]
    fn ids_with_commas_are_quoted() {
        let mut r = damage_assess(&flat_model(1.0, 1.0), &DamageMap::default());
        r.building_id = "a,\"b\"".into();
        let csv = emit_report(&[r], ReportFormat::Csv);
        assert!(csv.lines().nth(1).unwrap().starts_with("\"a,\"\"b\"\"\","));
    }
}
