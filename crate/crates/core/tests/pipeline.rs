use std::fs;

use footprint3d::ingest::footprints_to_geojson;
use footprint3d::pipeline::process_footprint;
use footprint3d::synth::synthetic_footprints;
use footprint3d::{run_pipeline, PipelineConfig, PipelineError, Point, ReportFormat};

#[test]
fn writes_one_model_per_building_and_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.geojson");
    let mut fps = synthetic_footprints(12, 3);
    fps[4].vertices.swap(1, 2);
    fs::write(&input, footprints_to_geojson(&fps)).unwrap();
    let mut config = PipelineConfig::new(&input, dir.path().join("out"));
    config.report_format = ReportFormat::Json;
    config.workers = 2;
    let s = run_pipeline(&config).unwrap();
    assert_eq!((s.features, s.processed, s.skipped), (12, 11, 1));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(config.report_path()).unwrap()).unwrap();
    let ids: Vec<&str> = report.as_array().unwrap().iter().map(|r| r["building_id"].as_str().unwrap()).collect();
    let want: Vec<&str> = fps.iter().enumerate().filter(|(i, _)| *i != 4).map(|(_, f)| f.id.as_str()).collect();
    assert_eq!(ids, want);
    for id in want {
        assert!(config.out_dir.join(format!("{id}.obj")).exists());
    }
}

#[test]
fn models_stay_in_source_coordinates() {
    let mut fp = synthetic_footprints(1, 9).remove(0);
    let off = Point::new(512_345.0, 4_100_200.0);
    let local = process_footprint(&fp, &PipelineConfig::new("", "")).unwrap();
    fp.vertices.iter_mut().for_each(|p| *p += off);
    let far = process_footprint(&fp, &PipelineConfig::new("", "")).unwrap();
    for (a, b) in local.model.solids.iter().zip(&far.model.solids) {
        for (p, q) in a.mesh.vertices.iter().zip(&b.mesh.vertices) {
            assert!((q.x - p.x - off.x).abs() < 1e-6 && (q.y - p.y - off.y).abs() < 1e-6 && (q.z - p.z).abs() < 1e-9);
        }
    }
}

#[test]
fn empty_collection_has_no_valid_buildings() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.geojson");
    fs::write(&input, r#"{"type":"FeatureCollection","features":[]}"#).unwrap();
    let err = run_pipeline(&PipelineConfig::new(&input, dir.path().join("out"))).unwrap_err();
    assert!(matches!(err, PipelineError::NoValidBuildings(_)));
}
