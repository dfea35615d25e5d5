use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use footprint3d::ingest::footprints_to_geojson;
use footprint3d::synth::synthetic_footprints;

fn feature(id: &str, ring: &[(f64, f64)], roof: &str) -> String {
    let mut coords: Vec<String> = ring.iter().map(|(x, y)| format!("[{x},{y}]")).collect();
    coords.push(coords[0].clone());
    format!(
        r#"{{"type":"Feature","properties":{{"id":"{id}","stories":2,"roof_type":"{roof}","roof_material":"tile","wall_material":"brick"}},"geometry":{{"type":"Polygon","coordinates":[[{}]]}}}}"#,
        coords.join(",")
    )
}

fn collection(features: &[String]) -> String {
    format!(r#"{{"type":"FeatureCollection","features":[{}]}}"#, features.join(","))
}

const SQUARE: &[(f64, f64)] = &[(0., 0.), (0., 10.), (10., 10.), (10., 0.)];
const L_SHAPE: &[(f64, f64)] = &[(20., 0.), (20., 10.), (24., 10.), (24., 4.), (30., 4.), (30., 0.)];
const BOWTIE: &[(f64, f64)] = &[(40., 0.), (40., 6.), (46., 2.), (46., 8.)];

fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_footprint3d"));
    cmd.args(args).env_remove("FOOTPRINT3D_WORKERS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write_input(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn objs(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".obj"))
        .collect();
    v.sort();
    v
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn single_square_without_damage() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), "in.geojson", &collection(&[feature("sq", SQUARE, "gable")]));
    let out = dir.path().join("out");
    let o = run(&["--input", input.to_str().unwrap(), "--out", out.to_str().unwrap()], &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(objs(&out), vec!["sq.obj"]);
    assert!(out.join("materials.mtl").exists());
    let report = fs::read_to_string(out.join("report.csv")).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("sq,100.000,"));
    assert!(lines[1].ends_with(",0.000,0.000,0.000"));
}

#[test]
fn bowtie_is_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(
        dir.path(),
        "in.geojson",
        &collection(&[feature("a", SQUARE, "flat"), feature("bow", BOWTIE, "flat"), feature("c", L_SHAPE, "hipped")]),
    );
    let out = dir.path().join("out");
    let o = run(&["--input", input.to_str().unwrap(), "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("processed=2 skipped=1"), "{}", stdout(&o));
    assert_eq!(objs(&out), vec!["a.obj", "c.obj"]);
}

#[test]
fn unreadable_and_malformed_input_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.geojson");
    let o = run(&["--input", missing.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    let bad = write_input(dir.path(), "bad.geojson", "{\"type\": \"FeatureCollection\", \"features\": [");
    let o = run(&["--input", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("byte"));
}

#[test]
fn no_valid_buildings_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), "in.geojson", &collection(&[feature("bow", BOWTIE, "flat")]));
    let o = run(&["--input", input.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn invalid_roof_parameters_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), "in.geojson", &collection(&[feature("sq", SQUARE, "flat")]));
    let o = run(&["--input", input.to_str().unwrap(), "--slope", "95"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn damage_report_in_json_with_debug_svg() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), "in.geojson", &collection(&[feature("sq", SQUARE, "flat")]));
    // Covers the western half of the square and all of its western eave.
    let damage = r#"{"type":"FeatureCollection","features":[{"type":"Feature","properties":{},"geometry":{"type":"Polygon","coordinates":[[[-5,-5],[5,-5],[5,15],[-5,15],[-5,-5]]]}}]}"#;
    let damage = write_input(dir.path(), "damage.geojson", damage);
    let out = dir.path().join("out");
    let o = run(
        &[
            "--input",
            input.to_str().unwrap(),
            "--damage",
            damage.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--report-format",
            "json",
            "--debug-svg",
        ],
        &[],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(v[0]["building_id"], "sq");
    assert_eq!(v[0]["damage_fraction"], 0.5);
    assert!(out.join("sq.partition.svg").exists());
    assert!(out.join("sq.rectified.svg").exists());
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn outputs_are_identical_across_runs_and_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), "in.geojson", &footprints_to_geojson(&synthetic_footprints(40, 11)));
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let o = run(&["--input", input.to_str().unwrap(), "--out", a.to_str().unwrap(), "--workers", "1"], &[]);
    assert!(o.status.success());
    let o = run(&["--input", input.to_str().unwrap(), "--out", b.to_str().unwrap()], &[("FOOTPRINT3D_WORKERS", "4")]);
    assert!(o.status.success());
    let (ra, rb) = (read_all(&a), read_all(&b));
    assert_eq!(ra.len(), 40 + 2);
    assert!(ra == rb);
}
