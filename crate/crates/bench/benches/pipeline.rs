use std::fs;

use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use footprint3d::modelgen::assemble_building;
use footprint3d::{main_angle, partition, rectify_all, OpeningSpec, PipelineConfig, RoofParams};
use footprint3d_bench::{geojson, noisy_footprints, rings};

fn stages(c: &mut Criterion) {
    let rings = rings(200, 1);
    let mut g = c.benchmark_group("stages");
    g.throughput(Throughput::Elements(rings.len() as u64));
    g.bench_function("partition", |b| {
        b.iter(|| rings.iter().map(|r| partition(black_box(r)).unwrap().quads.len()).sum::<usize>())
    });
    let parts: Vec<_> = rings.iter().map(|r| (partition(r).unwrap(), main_angle(r))).collect();
    g.bench_function("rectify", |b| {
        b.iter(|| parts.iter().map(|(p, t)| rectify_all(black_box(p), t).unwrap().rects.len()).sum::<usize>())
    });
    let fps = noisy_footprints(200, 1);
    let layouts: Vec<_> = parts.iter().map(|(p, t)| rectify_all(p, t).unwrap()).collect();
    let roof = RoofParams::default();
    for (name, openings) in [("assemble", OpeningSpec::default()), ("assemble_plain", OpeningSpec::none())] {
        g.bench_function(name, |b| {
            b.iter(|| {
                fps.iter()
                    .zip(&layouts)
                    .map(|(fp, l)| assemble_building(&fp.id, black_box(l), &fp.attributes, &roof, &openings).unwrap().solids.len())
                    .sum::<usize>()
            })
        });
    }
    g.finish();
}

fn end_to_end(c: &mut Criterion) {
    let dir = std::env::temp_dir().join(format!("footprint3d-bench-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let input = dir.join("in.geojson");
    fs::write(&input, geojson(500, 2)).unwrap();
    let mut g = c.benchmark_group("pipeline");
    g.sample_size(10).throughput(Throughput::Elements(500));
    for workers in [1, 0] {
        let mut config = PipelineConfig::new(&input, dir.join("out"));
        config.workers = workers;
        g.bench_function(format!("run_500_workers_{workers}"), |b| {
            b.iter_batched(|| (), |_| footprint3d::run_pipeline(&config).unwrap(), BatchSize::PerIteration)
        });
    }
    g.finish();
    let _ = fs::remove_dir_all(&dir);
}

criterion_group!(benches, stages, end_to_end);
criterion_main!(benches);
