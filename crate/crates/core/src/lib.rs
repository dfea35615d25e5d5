//! Footprint-to-3D building model generation.
//!
//! Building footprints are partitioned into quadrilaterals, snapped to a
//! rectangular layout, and extruded into closed walls and roofs. Roof plane
//! areas can be overlaid with damage regions to produce per-building reports.

pub mod geometry;
pub mod ingest;
pub mod modelgen;
pub mod partition;
pub mod pipeline;
pub mod rectify;
pub mod report;
pub mod svg;
pub mod synth;

pub use geometry::Point;
pub use ingest::{BuildingAttributes, FootprintPolygon, RoofType};
pub use partition::{partition, DividingLine, DividingPattern, PartitionResult, Quad};
pub use modelgen::{assemble_building, BuildingModel, ModelError, OpeningSpec, RoofParams};
pub use partition::PartitionOptions;
pub use pipeline::{run_pipeline, PipelineConfig, PipelineError, Summary};
pub use rectify::{main_angle, rectify_all, validate_layout, MainAngle, Rect, RectifiedLayout};
pub use report::{damage_assess, emit_report, DamageMap, DamageRecord, ReportFormat};
