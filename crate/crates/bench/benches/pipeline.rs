use criterion::{criterion_group, criterion_main, Criterion};

use promptseg::fixtures::{synthetic_scenes, FixtureOptions};
use promptseg::runner::{run_on_scenes, Backend, ExperimentConfig};

fn bench_pipeline(c: &mut Criterion) {
    let scenes = synthetic_scenes(&FixtureOptions::default());
    let mut cfg = ExperimentConfig::new("bench");
    cfg.parallelism = 1;
    c.bench_function("oracle_grid_24_scenes_serial", |b| {
        b.iter(|| run_on_scenes(&cfg, &scenes, &Backend::Oracle).unwrap())
    });
    cfg.parallelism = 8;
    c.bench_function("oracle_grid_24_scenes_8_workers", |b| {
        b.iter(|| run_on_scenes(&cfg, &scenes, &Backend::Oracle).unwrap())
    });
}

criterion_group!(benches, bench_pipeline);
criterion_main!(benches);
