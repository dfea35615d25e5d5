//! Batch run: footprints in, OBJ models, debug drawings and a damage report out.

use std::fs;
use std::io;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{bbox, Point};
use crate::ingest::{
    filter_collinear, parse_footprints, parse_polygon_rings, validate, FootprintPolygon, IngestError,
    DEFAULT_COLLINEAR_TOL_DEG,
};
use crate::modelgen::{
    assemble_building, unique_stems, write_building_obj, BuildingModel, ModelError, OpeningSpec, RoofParams,
    MATERIAL_LIBRARY, P3,
};
use crate::partition::{partition_with, PartitionError, PartitionOptions, PartitionResult};
use crate::rectify::{main_angle, rectify_all, validate_layout, LayoutReport, RectifiedLayout, RectifyError};
use crate::report::{damage_assess, emit_report, DamageMap, DamageRecord, ReportFormat};
use crate::svg::{layout_svg, partition_svg};

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub damage: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub roof: RoofParams,
    pub openings: OpeningSpec,
    pub collinear_tol_deg: f64,
    pub partition: PartitionOptions,
    pub report_format: ReportFormat,
    pub debug_svg: bool,
    /// Worker threads; 0 uses one per core.
    pub workers: usize,
}

impl PipelineConfig {
    pub fn new(input: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            damage: None,
            out_dir: out_dir.into(),
            roof: RoofParams::default(),
            openings: OpeningSpec::default(),
            collinear_tol_deg: DEFAULT_COLLINEAR_TOL_DEG,
            partition: PartitionOptions::default(),
            report_format: ReportFormat::Csv,
            debug_svg: false,
            workers: 0,
        }
    }

    pub fn report_path(&self) -> PathBuf {
        self.out_dir.join(match self.report_format {
            ReportFormat::Csv => "report.csv",
            ReportFormat::Json => "report.json",
        })
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: IngestError },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no valid buildings in {0}")]
    NoValidBuildings(PathBuf),
}

/// Why one building was left out of the outputs.
#[derive(Debug, Error)]
pub enum BuildingError {
    #[error("invalid footprint: {0}")]
    Invalid(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("partition failed: {0}")]
    Partition(#[from] PartitionError),
    #[error("rectification failed: {0}")]
    Rectify(#[from] RectifyError),
    #[error("model generation failed: {0}")]
    Model(#[from] ModelError),
    #[error("internal error: {0}")]
    Panic(String),
}

/// Everything produced for one building, in its source coordinates.
#[derive(Debug, Clone)]
pub struct BuildingOutput {
    pub footprint: FootprintPolygon,
    pub partition: PartitionResult,
    pub layout: RectifiedLayout,
    pub layout_report: LayoutReport,
    pub model: BuildingModel,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Summary {
    pub features: usize,
    pub processed: usize,
    pub skipped: usize,
    pub layout_warnings: usize,
    pub damage_regions_skipped: usize,
    pub report: Option<PathBuf>,
}

fn translate_layout(layout: &mut RectifiedLayout, d: Point) {
    for q in &mut layout.quads {
        q.verts_pre = q.verts_pre.map(|p| p + d);
        q.verts_post = q.verts_post.map(|v| v.map(|p| p + d));
    }
    for r in &mut layout.rects {
        r.corners = r.corners.map(|p| p + d);
    }
}

fn translate_model(model: &mut BuildingModel, d: Point) {
    let d3 = P3::new(d.x, d.y, 0.0);
    for s in &mut model.solids {
        for v in &mut s.mesh.vertices {
            *v = *v + d3;
        }
        if let Some(rp) = &mut s.roof_plane {
            rp.plan.iter_mut().for_each(|p| *p += d);
        }
    }
    for rp in &mut model.roof_planes {
        rp.plan.iter_mut().for_each(|p| *p += d);
    }
}

/// Runs one footprint through filtering, partition, rectification and model
/// assembly. Geometry is processed relative to the footprint's bounding-box
/// corner and moved back at the end.
pub fn process_footprint(
    fp: &FootprintPolygon,
    config: &PipelineConfig,
) -> Result<BuildingOutput, BuildingError> {
    let issues = validate(fp);
    if !issues.is_empty() {
        let text: Vec<String> = issues.iter().map(|v| v.to_string()).collect();
        return Err(BuildingError::Invalid(text.join(", ")));
    }
    let fp = filter_collinear(fp.clone(), config.collinear_tol_deg)?;
    let (origin, _) = bbox(&fp.vertices);
    let local: Vec<Point> = fp.vertices.iter().map(|&p| p - origin).collect();
    let mut partition = partition_with(&local, &config.partition)?;
    let theta = main_angle(&local);
    let mut layout = rectify_all(&partition, &theta)?;
    let layout_report = validate_layout(&layout);
    let mut model = assemble_building(&fp.id, &layout, &fp.attributes, &config.roof, &config.openings)?;

    translate_model(&mut model, origin);
    translate_layout(&mut layout, origin);
    for q in &mut partition.quads {
        q.verts_pre = q.verts_pre.map(|p| p + origin);
    }
    for t in &mut partition.trace {
        t.body_before.iter_mut().for_each(|p| *p += origin);
        for dl in t.candidates.iter_mut().chain(std::iter::once(&mut t.chosen)) {
            dl.start += origin;
            dl.endpoint += origin;
        }
    }
    Ok(BuildingOutput { footprint: fp, partition, layout, layout_report, model })
}

fn guarded(fp: &FootprintPolygon, config: &PipelineConfig) -> Result<BuildingOutput, BuildingError> {
    catch_unwind(AssertUnwindSafe(|| process_footprint(fp, config))).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| e.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".into());
        Err(BuildingError::Panic(msg))
    })
}

/// Processes every footprint on `workers` threads (0 = one per core).
/// Results come back in input order.
pub fn process_all(
    footprints: &[FootprintPolygon],
    config: &PipelineConfig,
) -> Vec<Result<BuildingOutput, BuildingError>> {
    with_workers(config.workers, || footprints.par_iter().map(|fp| guarded(fp, config)).collect())
}

fn with_workers<T: Send>(workers: usize, run: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(run),
        Err(e) => {
            warn!("cannot build a {workers}-thread pool ({e}); using the global pool");
            run()
        }
    }
}

fn read(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|source| PipelineError::Read { path: path.to_path_buf(), source })
}

fn write(path: PathBuf, text: &str) -> Result<(), PipelineError> {
    fs::write(&path, text).map_err(|source| PipelineError::Write { path, source })
}

fn load_damage(config: &PipelineConfig) -> Result<DamageMap, PipelineError> {
    let Some(path) = &config.damage else {
        return Ok(DamageMap::default());
    };
    let text = read(path)?;
    let (rings, diags) = parse_polygon_rings(&text)
        .map_err(|source| PipelineError::Parse { path: path.clone(), source })?;
    for d in &diags {
        warn!("damage {d}; region skipped");
    }
    let regions: Vec<Vec<Point>> = rings.into_iter().map(|(_, r)| r).collect();
    let mut map = DamageMap::new(&regions);
    for (i, reason) in &map.skipped {
        warn!("damage region {i}: {reason}; region skipped");
    }
    map.skipped.extend(diags.into_iter().map(|d| (d.index, d.issue.to_string())));
    Ok(map)
}

/// Full batch run. Per-building failures are logged and skipped.
pub fn run_pipeline(config: &PipelineConfig) -> Result<Summary, PipelineError> {
    config.roof.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
    if !(config.collinear_tol_deg >= 0.0 && config.collinear_tol_deg < 45.0) {
        return Err(PipelineError::Config("collinear tolerance must lie in [0, 45) degrees".into()));
    }
    let text = read(&config.input)?;
    let parsed = parse_footprints(&text)
        .map_err(|source| PipelineError::Parse { path: config.input.clone(), source })?;
    let damage = load_damage(config)?;
    let mut summary = Summary {
        features: parsed.footprints.len() + parsed.diagnostics.len(),
        skipped: parsed.diagnostics.len(),
        damage_regions_skipped: damage.skipped.len(),
        ..Summary::default()
    };
    for d in &parsed.diagnostics {
        warn!("{d}; skipped");
    }

    let results = process_all(&parsed.footprints, config);
    let mut outputs = Vec::with_capacity(results.len());
    for (fp, r) in parsed.footprints.iter().zip(results) {
        match r {
            Ok(out) => outputs.push(out),
            Err(e) => {
                warn!("building {}: {e}; skipped", fp.id);
                summary.skipped += 1;
            }
        }
    }
    if outputs.is_empty() {
        return Err(PipelineError::NoValidBuildings(config.input.clone()));
    }
    summary.processed = outputs.len();

    fs::create_dir_all(&config.out_dir)
        .map_err(|source| PipelineError::Write { path: config.out_dir.clone(), source })?;
    let stems = unique_stems(outputs.iter().map(|o| o.model.id.as_str()));
    type Rendered = (String, Option<(String, String)>, DamageRecord);
    let rendered: Vec<Rendered> = with_workers(config.workers, || {
        outputs
            .par_iter()
            .map(|o| {
                let svg = config.debug_svg.then(|| {
                    let ring = &o.footprint.vertices;
                    (partition_svg(ring, &o.partition), layout_svg(ring, &o.layout))
                });
                (write_building_obj(&o.model), svg, damage_assess(&o.model, &damage))
            })
            .collect()
    });
    let mut records = Vec::with_capacity(outputs.len());
    for ((o, stem), (obj, svg, record)) in outputs.iter().zip(&stems).zip(rendered) {
        if !o.layout_report.is_clean() {
            summary.layout_warnings += 1;
            warn!(
                "building {}: layout residual {:.3e} m, overlap {:.3e} m2",
                o.model.id, o.layout_report.max_residual, o.layout_report.max_overlap
            );
        }
        for d in &o.model.diagnostics {
            info!("building {}: {d}", o.model.id);
        }
        write(config.out_dir.join(format!("{stem}.obj")), &obj)?;
        if let Some((part, rect)) = svg {
            write(config.out_dir.join(format!("{stem}.partition.svg")), &part)?;
            write(config.out_dir.join(format!("{stem}.rectified.svg")), &rect)?;
        }
        records.push(record);
    }
    let models: Vec<BuildingModel> = outputs.into_iter().map(|o| o.model).collect();
    write(config.out_dir.join(MATERIAL_LIBRARY), &crate::modelgen::export::material_library(&models))?;
    let report = config.report_path();
    write(report.clone(), &emit_report(&records, config.report_format))?;
    summary.report = Some(report);
    Ok(summary)
}
