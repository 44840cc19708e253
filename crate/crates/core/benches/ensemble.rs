use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cauchy_wave::experiments::ensemble::{prepare_inverse, run_prepared};
use cauchy_wave::experiments::{ExampleId, ExperimentConfig, Setup};
use cauchy_wave::Exec;

fn ensembles(c: &mut Criterion) {
    let mut group = c.benchmark_group("ensemble");
    group.sample_size(10).measurement_time(Duration::from_secs(20));
    for (id, paths) in [(ExampleId::OneB, 32), (ExampleId::TwoA, 4)] {
        let mut cfg = ExperimentConfig::default_for(id);
        cfg.n_paths = paths;
        // Operator and SVD are shared across paths and built once, outside the timing.
        let setup = Setup::new(&cfg).unwrap();
        let inverse = prepare_inverse(&setup).unwrap();
        for exec in [Exec::Sequential, Exec::Parallel] {
            let label = format!("{id}/{paths}");
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), label), &exec, |b, &exec| {
                b.iter(|| black_box(run_prepared(&setup, &inverse, exec).unwrap().report.metrics.summary))
            });
        }
    }
    group.finish();
}

fn preparation(c: &mut Criterion) {
    let mut group = c.benchmark_group("prepare");
    group.sample_size(10);
    for id in [ExampleId::OneB, ExampleId::TwoA] {
        let setup = Setup::new(&ExperimentConfig::default_for(id)).unwrap();
        group.bench_function(id.as_str(), |b| b.iter(|| black_box(prepare_inverse(&setup).unwrap().svd.sigma_max())));
    }
    group.finish();
}

criterion_group!(benches, ensembles, preparation);
criterion_main!(benches);
