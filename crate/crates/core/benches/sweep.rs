use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use igsim::experiments::{run_batch, surface_mean_abs_gap, Execution, SurfaceConfig, SweepConfig};
use igsim::Seed;

fn modes() -> [(&'static str, Execution); 2] {
    [("sequential", Execution::Sequential), ("parallel", Execution::default())]
}

fn sweep(c: &mut Criterion) {
    let mut cfg = SweepConfig::two_party(Seed(1));
    cfg.p0_grid = vec![0.4];
    cfg.h_grid = vec![0.2, 0.5, 0.8];
    cfg.elections_per_cell = 50;
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_batch(&cfg, exec).unwrap())
        });
    }
    group.finish();
}

fn surface(c: &mut Criterion) {
    let cfg = SurfaceConfig {
        p0_grid: vec![0.0, 0.5, 1.0],
        h_grid: vec![0.2, 0.8],
        samples: 20,
        ..SurfaceConfig::new(Seed(2))
    };
    let mut group = c.benchmark_group("surface");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| surface_mean_abs_gap(&cfg, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweep, surface);
criterion_main!(benches);
