//! Footprint ingestion: GeoJSON parsing, ring orientation and cleanup.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::geometry::{interior_angle_deg, is_simple, signed_area, Point};

/// Default tolerance, in degrees, for dropping near-straight vertices.
pub const DEFAULT_COLLINEAR_TOL_DEG: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoofType {
    Flat,
    Gable,
    Hipped,
}

impl RoofType {
    pub fn as_str(self) -> &'static str {
        match self {
            RoofType::Flat => "flat",
            RoofType::Gable => "gable",
            RoofType::Hipped => "hipped",
        }
    }
}

impl std::str::FromStr for RoofType {
    type Err = FeatureIssue;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "flat" => Ok(RoofType::Flat),
            "gable" => Ok(RoofType::Gable),
            "hipped" | "hip" => Ok(RoofType::Hipped),
            _ => Err(FeatureIssue::UnsupportedRoofType(s.to_string())),
        }
    }
}

impl fmt::Display for RoofType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildingAttributes {
    pub stories: u32,
    pub roof_type: RoofType,
    pub roof_material: String,
    pub wall_material: String,
}

/// A building footprint: an open vertex ring plus its attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct FootprintPolygon {
    pub id: String,
    pub vertices: Vec<Point>,
    pub attributes: BuildingAttributes,
}

impl FootprintPolygon {
    pub fn signed_area(&self) -> f64 {
        signed_area(&self.vertices)
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed JSON at byte {offset}: {message}")]
    Json { offset: usize, message: String },
    #[error("document is not a GeoJSON FeatureCollection")]
    NotFeatureCollection,
    #[error("degenerate polygon {id}: {reason}")]
    Degenerate { id: String, reason: String },
}

/// Why a single feature was skipped.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeatureIssue {
    #[error("missing attribute \"{0}\"")]
    MissingAttribute(&'static str),
    #[error("invalid attribute \"{name}\": {reason}")]
    InvalidAttribute { name: &'static str, reason: String },
    #[error("unsupported roof type \"{0}\"")]
    UnsupportedRoofType(String),
    #[error("unsupported geometry type \"{0}\"")]
    UnsupportedGeometry(String),
    #[error("polygon has {0} interior ring(s); holes are not supported")]
    HasHoles(usize),
    #[error("invalid coordinates: {0}")]
    InvalidCoordinates(String),
    #[error("zero-area ring")]
    ZeroArea,
}

/// A per-feature diagnostic produced while parsing.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDiagnostic {
    pub index: usize,
    pub id: String,
    pub issue: FeatureIssue,
}

impl fmt::Display for FeatureDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "feature {} ({}): {}", self.index, self.id, self.issue)
    }
}

#[derive(Debug, Default)]
pub struct ParsedFootprints {
    pub footprints: Vec<FootprintPolygon>,
    pub diagnostics: Vec<FeatureDiagnostic>,
}

/// Parses a GeoJSON FeatureCollection of building footprints.
///
/// Bad features are reported in `diagnostics` and skipped; only a document
/// that is not JSON, or not a FeatureCollection, fails as a whole. Rings come
/// back clockwise with the duplicated closing vertex removed.
pub fn parse_footprints(document: &str) -> Result<ParsedFootprints, IngestError> {
    let features = parse_feature_array(document)?;
    let mut out = ParsedFootprints::default();
    for (index, feature) in features.iter().enumerate() {
        let id = feature_id(feature, index);
        match parse_feature(feature, &id) {
            Ok(fp) => out.footprints.push(fp),
            Err(issue) => out.diagnostics.push(FeatureDiagnostic { index, id, issue }),
        }
    }
    Ok(out)
}

/// Parses bare polygon rings (no attributes) from a FeatureCollection, e.g.
/// damage regions. Rings are returned as stored, closing vertex removed.
pub fn parse_polygon_rings(
    document: &str,
) -> Result<(Vec<(String, Vec<Point>)>, Vec<FeatureDiagnostic>), IngestError> {
    let features = parse_feature_array(document)?;
    let mut rings = Vec::new();
    let mut diagnostics = Vec::new();
    for (index, feature) in features.iter().enumerate() {
        let id = feature_id(feature, index);
        match exterior_ring(feature) {
            Ok(ring) => rings.push((id, ring)),
            Err(issue) => diagnostics.push(FeatureDiagnostic { index, id, issue }),
        }
    }
    Ok((rings, diagnostics))
}

fn parse_feature_array(document: &str) -> Result<Vec<Value>, IngestError> {
    let root: Value = serde_json::from_str(document).map_err(|e| IngestError::Json {
        offset: byte_offset(document, e.line(), e.column()),
        message: e.to_string(),
    })?;
    if root.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(IngestError::NotFeatureCollection);
    }
    match root.get("features") {
        Some(Value::Array(features)) => Ok(features.clone()),
        _ => Err(IngestError::NotFeatureCollection),
    }
}

/// serde_json reports 1-based line and byte column; turn that into an offset.
fn byte_offset(document: &str, line: usize, column: usize) -> usize {
    let mut offset = 0;
    for (i, l) in document.split_inclusive('\n').enumerate() {
        if i + 1 == line {
            return (offset + column.saturating_sub(1)).min(document.len());
        }
        offset += l.len();
    }
    document.len()
}

fn feature_id(feature: &Value, index: usize) -> String {
    let from = |v: Option<&Value>| match v {
        Some(Value::String(s)) => Some(s.clone()),
        Some(Value::Number(n)) => Some(n.to_string()),
        _ => None,
    };
    from(feature.get("id"))
        .or_else(|| from(feature.get("properties").and_then(|p| p.get("id"))))
        .unwrap_or_else(|| format!("feature-{index}"))
}

fn parse_feature(feature: &Value, id: &str) -> Result<FootprintPolygon, FeatureIssue> {
    let attributes = parse_attributes(feature.get("properties"))?;
    let vertices = exterior_ring(feature)?;
    let poly = FootprintPolygon { id: id.to_string(), vertices, attributes };
    normalize_orientation(poly).map_err(|_| FeatureIssue::ZeroArea)
}

fn parse_attributes(props: Option<&Value>) -> Result<BuildingAttributes, FeatureIssue> {
    let props = props.unwrap_or(&Value::Null);
    let stories = match props.get("stories") {
        None | Some(Value::Null) => return Err(FeatureIssue::MissingAttribute("stories")),
        Some(v) => v.as_u64().filter(|&s| s > 0 && s <= u32::MAX as u64).ok_or_else(|| {
            FeatureIssue::InvalidAttribute {
                name: "stories",
                reason: format!("expected a positive integer, got {v}"),
            }
        })? as u32,
    };
    let text = |name: &'static str| match props.get(name) {
        None | Some(Value::Null) => Err(FeatureIssue::MissingAttribute(name)),
        Some(Value::String(s)) => Ok(s.clone()),
        Some(v) => Err(FeatureIssue::InvalidAttribute {
            name,
            reason: format!("expected a string, got {v}"),
        }),
    };
    let roof_type = text("roof_type")?.parse::<RoofType>()?;
    Ok(BuildingAttributes {
        stories,
        roof_type,
        roof_material: text("roof_material")?,
        wall_material: text("wall_material")?,
    })
}

fn exterior_ring(feature: &Value) -> Result<Vec<Point>, FeatureIssue> {
    let geometry = feature
        .get("geometry")
        .ok_or_else(|| FeatureIssue::UnsupportedGeometry("null".into()))?;
    let kind = geometry.get("type").and_then(Value::as_str).unwrap_or("null");
    if kind != "Polygon" {
        return Err(FeatureIssue::UnsupportedGeometry(kind.to_string()));
    }
    let rings = geometry
        .get("coordinates")
        .and_then(Value::as_array)
        .ok_or_else(|| FeatureIssue::InvalidCoordinates("missing coordinates".into()))?;
    if rings.is_empty() {
        return Err(FeatureIssue::InvalidCoordinates("no rings".into()));
    }
    if rings.len() > 1 {
        return Err(FeatureIssue::HasHoles(rings.len() - 1));
    }
    let raw = rings[0]
        .as_array()
        .ok_or_else(|| FeatureIssue::InvalidCoordinates("ring is not an array".into()))?;
    let mut ring = Vec::with_capacity(raw.len());
    for pos in raw {
        let xy = pos
            .as_array()
            .filter(|a| a.len() >= 2)
            .and_then(|a| Some(Point::new(a[0].as_f64()?, a[1].as_f64()?)))
            .ok_or_else(|| FeatureIssue::InvalidCoordinates(format!("bad position {pos}")))?;
        if !xy.x.is_finite() || !xy.y.is_finite() {
            return Err(FeatureIssue::InvalidCoordinates(format!("non-finite position {pos}")));
        }
        ring.push(xy);
    }
    if ring.len() > 1 && ring.first() == ring.last() {
        ring.pop();
    }
    Ok(ring)
}

/// Serializes footprints as a GeoJSON FeatureCollection (closed rings).
pub fn footprints_to_geojson(footprints: &[FootprintPolygon]) -> String {
    let features: Vec<Value> = footprints
        .iter()
        .map(|fp| {
            let mut ring: Vec<Value> = fp.vertices.iter().map(|p| json!([p.x, p.y])).collect();
            if let Some(first) = ring.first().cloned() {
                ring.push(first);
            }
            json!({
                "type": "Feature",
                "id": fp.id,
                "geometry": { "type": "Polygon", "coordinates": [ring] },
                "properties": {
                    "stories": fp.attributes.stories,
                    "roof_type": fp.attributes.roof_type.as_str(),
                    "roof_material": fp.attributes.roof_material,
                    "wall_material": fp.attributes.wall_material,
                }
            })
        })
        .collect();
    json!({ "type": "FeatureCollection", "features": features }).to_string()
}

/// Reverses a counter-clockwise ring, keeping vertex 0 as the start.
pub fn normalize_orientation(mut poly: FootprintPolygon) -> Result<FootprintPolygon, IngestError> {
    let a = signed_area(&poly.vertices);
    if a == 0.0 || !a.is_finite() {
        return Err(IngestError::Degenerate { id: poly.id, reason: "zero-area ring".into() });
    }
    if a > 0.0 {
        poly.vertices[1..].reverse();
    }
    Ok(poly)
}

/// Drops vertices whose interior angle lies within `tol_deg` of 180 degrees,
/// along with repeated consecutive points.
///
/// The most nearly straight vertex is removed first and angles are
/// re-evaluated after every removal, so the result is a fixed point.
pub fn filter_collinear(
    mut poly: FootprintPolygon,
    tol_deg: f64,
) -> Result<FootprintPolygon, IngestError> {
    let v = &mut poly.vertices;
    v.dedup();
    while v.len() > 1 && v.first() == v.last() {
        v.pop();
    }
    loop {
        let n = v.len();
        if n < 3 {
            break;
        }
        let worst = (0..n)
            .map(|i| {
                let a = interior_angle_deg(v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
                (i, (a - 180.0).abs())
            })
            .filter(|&(_, dev)| dev <= tol_deg)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match worst {
            Some((i, _)) => {
                v.remove(i);
            }
            None => break,
        }
    }
    if v.len() < 4 {
        return Err(IngestError::Degenerate {
            id: poly.id,
            reason: format!("{} vertices left after collinear filtering", v.len()),
        });
    }
    Ok(poly)
}

/// A violated footprint property, as reported by [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    TooFewVertices,
    RepeatedVertex,
    NotSimple,
    ZeroArea,
    NotClockwise,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Violation::TooFewVertices => "fewer than 4 vertices",
            Violation::RepeatedVertex => "repeated consecutive vertex",
            Violation::NotSimple => "not simple",
            Violation::ZeroArea => "zero area",
            Violation::NotClockwise => "not clockwise",
        })
    }
}

/// Checks the footprint invariants; empty means valid.
///
/// Orientation and area are only meaningful for simple rings, so they are
/// not reported for rings that self-intersect.
pub fn validate(poly: &FootprintPolygon) -> Vec<Violation> {
    let v = &poly.vertices;
    let mut out = Vec::new();
    if v.len() < 4 {
        out.push(Violation::TooFewVertices);
    }
    let n = v.len();
    if (0..n).any(|i| v[i] == v[(i + 1) % n]) {
        out.push(Violation::RepeatedVertex);
        return out;
    }
    if n >= 3 && !is_simple(v) {
        out.push(Violation::NotSimple);
        return out;
    }
    let a = signed_area(v);
    if a == 0.0 {
        out.push(Violation::ZeroArea);
    } else if a > 0.0 {
        out.push(Violation::NotClockwise);
    }
    out
}
