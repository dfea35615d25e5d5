use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use footprint3d::ingest::DEFAULT_COLLINEAR_TOL_DEG;
use footprint3d::{run_pipeline, OpeningSpec, PipelineConfig, PipelineError, ReportFormat, RoofParams};
use log::error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Converts orthogonal building footprints into closed 3D models with
/// parametric roofs and writes a per-building roof damage report.
///
/// Coordinates must already be planar and in meters; no reprojection is done.
#[derive(Debug, Parser)]
#[command(name = "footprint3d", version)]
struct Args {
    /// GeoJSON FeatureCollection of footprint polygons with the properties
    /// stories, roof_type (flat|gable|hipped), roof_material and wall_material.
    #[arg(long)]
    input: PathBuf,
    /// GeoJSON FeatureCollection of damage-region polygons.
    #[arg(long)]
    damage: Option<PathBuf>,
    /// Output directory for OBJ files, materials and the report.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Roof slope in degrees.
    #[arg(long, default_value_t = 30.0)]
    slope: f64,
    /// Eaves overhang in meters, on all sides.
    #[arg(long, default_value_t = 0.5)]
    eaves: f64,
    /// Gap between the nominal roof plane and the roof boards, in meters.
    #[arg(long, default_value_t = 0.05)]
    rf_offs: f64,
    /// Roof board thickness in meters.
    #[arg(long, default_value_t = 0.15)]
    thick_rf: f64,
    /// Floor-to-floor height in meters.
    #[arg(long, default_value_t = 3.0)]
    floor_height: f64,
    /// Vertices within this many degrees of a straight angle are dropped.
    #[arg(long, default_value_t = DEFAULT_COLLINEAR_TOL_DEG)]
    collinear_tol: f64,
    #[arg(long, value_enum, default_value = "csv")]
    report_format: Format,
    /// Also write partition and rectified-layout SVGs per building.
    #[arg(long)]
    debug_svg: bool,
    /// Leave walls without windows and doors.
    #[arg(long)]
    no_openings: bool,
    /// Worker threads (0 = one per core).
    #[arg(long, env = "FOOTPRINT3D_WORKERS", default_value_t = 0)]
    workers: usize,
}

impl Args {
    fn config(&self) -> PipelineConfig {
        let mut c = PipelineConfig::new(&self.input, &self.out);
        c.damage = self.damage.clone();
        c.roof = RoofParams {
            theta_slope: self.slope.to_radians(),
            eaves23: self.eaves,
            eaves12: self.eaves,
            rf_offs: self.rf_offs,
            thick_rf: self.thick_rf,
            floor_height: self.floor_height,
        };
        if self.no_openings {
            c.openings = OpeningSpec::none();
        }
        c.collinear_tol_deg = self.collinear_tol;
        c.report_format = match self.report_format {
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
        };
        c.debug_svg = self.debug_svg;
        c.workers = self.workers;
        c
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match run_pipeline(&args.config()) {
        Ok(s) => {
            println!(
                "processed={} skipped={} layout_warnings={} damage_regions_skipped={}",
                s.processed, s.skipped, s.layout_warnings, s.damage_regions_skipped
            );
            if let Some(r) = s.report {
                println!("report={}", r.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            error!("{e}");
            eprintln!("footprint3d: {e}");
            ExitCode::from(match e {
                PipelineError::NoValidBuildings(_) => 1,
                _ => 2,
            })
        }
    }
}
