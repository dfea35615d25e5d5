//! Building bodies and parametric roofs on a rectified layout.

mod body;
pub mod export;
pub mod mesh;
mod roof;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::Point;
use crate::ingest::{BuildingAttributes, RoofType};
use crate::rectify::RectifiedLayout;

pub use body::{build_body, free_intervals, plan_openings, Opening, OpeningKind, OpeningSpec};
pub use export::{export_obj, sanitize_id, unique_stems, write_building_obj, ExportError, MATERIAL_LIBRARY};
pub use mesh::{Mesh, MeshDefect, P3};
pub use roof::{
    build_flat_roof, build_gable_roof, build_hipped_roof, derived_roof_quantities, RoofQuantities,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("invalid roof parameters: {0}")]
    InvalidParams(String),
    #[error("roof parameters do not fit rectangle {rect}: {reason}")]
    RoofParameter { rect: usize, reason: String },
    #[error("solid {solid} of rectangle {rect} is not closed: {defect:?}")]
    OpenSolid { rect: usize, solid: usize, defect: MeshDefect },
}

impl ModelError {
    fn at_rect(self, i: usize) -> Self {
        match self {
            ModelError::RoofParameter { reason, .. } => ModelError::RoofParameter { rect: i, reason },
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoofParams {
    /// Roof slope against the horizontal, radians.
    pub theta_slope: f64,
    pub eaves23: f64,
    pub eaves12: f64,
    pub rf_offs: f64,
    pub thick_rf: f64,
    pub floor_height: f64,
}

impl Default for RoofParams {
    fn default() -> Self {
        Self {
            theta_slope: 30f64.to_radians(),
            eaves23: 0.5,
            eaves12: 0.5,
            rf_offs: 0.05,
            thick_rf: 0.15,
            floor_height: 3.0,
        }
    }
}

impl RoofParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::InvalidParams(m.to_string()));
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&self.theta_slope) {
            return bad("slope must lie in [0, 90) degrees");
        }
        if !(self.thick_rf > 0.0) {
            return bad("roof board thickness must be positive");
        }
        if !(self.floor_height > 0.0) {
            return bad("floor height must be positive");
        }
        if !(self.eaves12 >= 0.0 && self.eaves23 >= 0.0 && self.rf_offs >= 0.0) {
            return bad("eaves and roof offset must be non-negative");
        }
        Ok(())
    }

    pub fn start_height(&self, stories: u32) -> f64 {
        self.floor_height * stories as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolidKind {
    Body,
    FlatRoof,
    GableBoard,
    GableEnd,
    HipBoard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneKind {
    Flat,
    Gable,
    HipTrapezoid,
    HipTriangle,
}

/// One roof plane: slope and its plan-projected outline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoofPlane {
    pub rect: usize,
    pub kind: PlaneKind,
    pub slope: f64,
    pub plan: Vec<Point>,
}

impl RoofPlane {
    pub fn plan_area(&self) -> f64 {
        crate::geometry::area(&self.plan)
    }

    pub fn true_area(&self) -> f64 {
        self.plan_area() / self.slope.cos()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solid {
    pub kind: SolidKind,
    pub rect: usize,
    pub mesh: Mesh,
    pub material: String,
    pub roof_plane: Option<RoofPlane>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildingModel {
    pub id: String,
    pub solids: Vec<Solid>,
    pub footprint_area: f64,
    pub roof_planes: Vec<RoofPlane>,
    pub openings: Vec<Opening>,
    pub diagnostics: Vec<String>,
}

/// Body and roof solids for every rectangle of the layout.
pub fn assemble_building(
    id: &str,
    layout: &RectifiedLayout,
    attrs: &BuildingAttributes,
    p: &RoofParams,
    openings: &OpeningSpec,
) -> Result<BuildingModel, ModelError> {
    p.validate()?;
    let stories = attrs.stories.max(1);
    let mut solids = Vec::new();
    let mut all_openings = Vec::new();
    let mut diagnostics = Vec::new();
    let door_rect = layout.rects.len() - 1;
    for (i, rect) in layout.rects.iter().enumerate() {
        let (ops, diags) = plan_openings(layout, i, stories, p.floor_height, openings, i == door_rect);
        diagnostics.extend(diags);
        solids.push(build_body(rect, p.start_height(stories), &ops, openings.depth, &attrs.wall_material));
        all_openings.extend(ops);
        let oq = rect.oriented(&layout.theta);
        let roof = match attrs.roof_type {
            RoofType::Flat => vec![build_flat_roof(&oq, p, stories, &attrs.roof_material)],
            RoofType::Gable => {
                build_gable_roof(&oq, p, stories, &attrs.roof_material, &attrs.wall_material)
                    .map_err(|e| e.at_rect(i))?
            }
            RoofType::Hipped => {
                build_hipped_roof(&oq, p, stories, &attrs.roof_material).map_err(|e| e.at_rect(i))?
            }
        };
        solids.extend(roof.into_iter().map(|mut s| {
            s.rect = i;
            if let Some(rp) = &mut s.roof_plane {
                rp.rect = i;
            }
            s
        }));
    }
    for (n, s) in solids.iter().enumerate() {
        s.mesh
            .check_closed()
            .map_err(|defect| ModelError::OpenSolid { rect: s.rect, solid: n, defect })?;
    }
    let roof_planes = solids.iter().filter_map(|s| s.roof_plane.clone()).collect();
    Ok(BuildingModel {
        id: id.to_string(),
        solids,
        footprint_area: layout.rects.iter().map(|r| r.area()).sum(),
        roof_planes,
        openings: all_openings,
        diagnostics,
    })
}
