//! Shared fixtures for the benchmarks.

use footprint3d::ingest::footprints_to_geojson;
use footprint3d::synth::{perturb, synthetic_footprints, Perturbation};
use footprint3d::{FootprintPolygon, Point};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Synthetic footprints rotated, shifted and jittered by a few centimeters.
pub fn noisy_footprints(count: usize, seed: u64) -> Vec<FootprintPolygon> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    synthetic_footprints(count, seed)
        .into_iter()
        .map(|mut fp| {
            fp.vertices = perturb(&mut rng, &fp.vertices, &Perturbation::default());
            fp
        })
        .collect()
}

/// Rings only, for the per-stage benchmarks.
pub fn rings(count: usize, seed: u64) -> Vec<Vec<Point>> {
    noisy_footprints(count, seed).into_iter().map(|fp| fp.vertices).collect()
}

pub fn geojson(count: usize, seed: u64) -> String {
    footprints_to_geojson(&synthetic_footprints(count, seed))
}
