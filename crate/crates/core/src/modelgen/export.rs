//! Wavefront OBJ output.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::BuildingModel;

pub const MATERIAL_LIBRARY: &str = "materials.mtl";

#[derive(Debug, Error)]
#[error("cannot write {path}: {source}")]
pub struct ExportError {
    pub path: PathBuf,
    #[source]
    pub source: io::Error,
}

fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// File-system safe form of a building id.
pub fn sanitize_id(id: &str) -> String {
    let s: String = id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect();
    if s.is_empty() || s.starts_with('.') {
        format!("_{s}")
    } else {
        s
    }
}

/// OBJ text for one building, one object per solid.
pub fn write_building_obj(model: &BuildingModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "mtllib {MATERIAL_LIBRARY}");
    let mut base = 1usize;
    for (n, solid) in model.solids.iter().enumerate() {
        let _ = writeln!(out, "o {}/{n}", sanitize_id(&model.id));
        let _ = writeln!(out, "usemtl {}", material_name(&solid.material));
        for v in &solid.mesh.vertices {
            let _ = writeln!(out, "v {} {} {}", num(v.x), num(v.y), num(v.z));
        }
        for t in &solid.mesh.triangles {
            let [a, b, c] = t.map(|i| i as usize + base);
            let _ = writeln!(out, "f {a} {b} {c}");
        }
        base += solid.mesh.vertices.len();
    }
    out
}

fn material_name(m: &str) -> String {
    let s: String = m.chars().map(|c| if c.is_whitespace() { '_' } else { c }).collect();
    if s.is_empty() {
        "default".to_string()
    } else {
        s
    }
}

/// Stable diffuse color derived from the material name.
fn diffuse(name: &str) -> [f64; 3] {
    let h = name.bytes().fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3));
    [(h & 0xff) as f64, ((h >> 8) & 0xff) as f64, ((h >> 16) & 0xff) as f64].map(|c| 0.3 + 0.6 * c / 255.0)
}

/// `newmtl` entries for every material used by `models`.
pub fn material_library(models: &[BuildingModel]) -> String {
    let names: BTreeSet<String> =
        models.iter().flat_map(|m| m.solids.iter().map(|s| material_name(&s.material))).collect();
    let mut out = String::new();
    for name in names {
        let [r, g, b] = diffuse(&name);
        let _ = writeln!(out, "newmtl {name}\nKd {r:.3} {g:.3} {b:.3}\n");
    }
    out
}

/// File stems for `ids` in order; later duplicates get a `-2`, `-3`, ... suffix.
pub fn unique_stems<'a>(ids: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let mut used = HashSet::new();
    ids.into_iter()
        .map(|id| {
            let base = sanitize_id(id);
            let mut stem = base.clone();
            let mut n = 1;
            while !used.insert(stem.to_ascii_lowercase()) {
                n += 1;
                stem = format!("{base}-{n}");
            }
            stem
        })
        .collect()
}

/// Writes `<id>.obj` per building and a shared material library into `dir`.
/// Returns the written paths, material library last.
pub fn export_obj(models: &[BuildingModel], dir: &Path) -> Result<Vec<PathBuf>, ExportError> {
    let write = |path: PathBuf, text: String| {
        fs::write(&path, text).map_err(|source| ExportError { path: path.clone(), source })?;
        Ok(path)
    };
    fs::create_dir_all(dir).map_err(|source| ExportError { path: dir.to_path_buf(), source })?;
    let mut paths = Vec::with_capacity(models.len() + 1);
    let stems = unique_stems(models.iter().map(|m| m.id.as_str()));
    for (m, stem) in models.iter().zip(stems) {
        paths.push(write(dir.join(format!("{stem}.obj")), write_building_obj(m))?);
    }
    paths.push(write(dir.join(MATERIAL_LIBRARY), material_library(models))?);
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelgen::mesh::{extrude, P3};
    use crate::modelgen::{Solid, SolidKind};

    fn model() -> BuildingModel {
        let base = [P3::new(0., 0., 0.), P3::new(0., 1., 0.), P3::new(1., 1., 0.), P3::new(1., 0., 0.)];
        let solid = |z: f64, mat: &str| Solid {
            kind: SolidKind::Body,
            rect: 0,
            mesh: extrude(&base.map(|p| p + P3::new(0., 0., z)), P3::new(0., 0., 1.)),
            material: mat.to_string(),
            roof_plane: None,
        };
        BuildingModel {
            id: "a/b c".into(),
            solids: vec![solid(0.0, "brick"), solid(1.0, "clay tile")],
            footprint_area: 1.0,
            roof_planes: vec![],
            openings: vec![],
            diagnostics: vec![],
        }
    }

    #[test]
    fn faces_index_per_solid_offsets() {
        let text = write_building_obj(&model());
        assert!(text.starts_with("mtllib materials.mtl\no a_b_c/0\nusemtl brick\n"));
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 16);
        let max_index = text
            .lines()
            .filter(|l| l.starts_with("f "))
            .flat_map(|l| l[2..].split(' ').map(|t| t.parse::<usize>().unwrap()))
            .max();
        assert_eq!(max_index, Some(16));
        assert!(text.contains("usemtl clay_tile"));
    }

    #[test]
    fn colliding_ids_get_suffixes() {
        assert_eq!(unique_stems(["a b", "a_b", "c", "A_B"]), vec!["a_b", "a_b-2", "c", "A_B-3"]);
    }

    #[test]
    fn negative_zero_is_normalized() {
        assert_eq!(num(-0.0), "0.000000");
        assert_eq!(num(-1e-9), "0.000000");
        assert_eq!(num(-1.5), "-1.500000");
    }

    #[test]
    fn export_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let paths = export_obj(&[model()], dir.path()).unwrap();
        assert_eq!(paths.len(), 2);
        let first: Vec<String> = paths.iter().map(|p| fs::read_to_string(p).unwrap()).collect();
        export_obj(&[model()], dir.path()).unwrap();
        let second: Vec<String> = paths.iter().map(|p| fs::read_to_string(p).unwrap()).collect();
        assert_eq!(first, second);
        assert!(first[1].contains("newmtl brick") && first[1].contains("newmtl clay_tile"));
    }
}
