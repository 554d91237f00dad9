use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use msc3::cli::sweep::{run_sweep, SweepConfig};
use msc3::msc::slice_spectra;
use msc3::pipeline::run_msc_dbscan;
use msc3::synth::{benchmark_spec, generate};
use msc3::{Execution, Mode, MscConfig};

const EXECUTIONS: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn config(exec: Execution) -> MscConfig {
    MscConfig {
        execution: exec,
        ..MscConfig::default()
    }
}

fn bench_spectra(c: &mut Criterion) {
    let (t, _) = generate(&benchmark_spec(80.0, 0).unwrap()).unwrap();
    let mut group = c.benchmark_group("slice_spectra");
    for (name, exec) in EXECUTIONS {
        let cfg = config(exec);
        group.bench_function(BenchmarkId::new(name, "50^3"), |b| {
            b.iter(|| slice_spectra(black_box(&t), Mode::One, &cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_pipeline(c: &mut Criterion) {
    let (t, _) = generate(&benchmark_spec(80.0, 0).unwrap()).unwrap();
    let mut group = c.benchmark_group("run_msc_dbscan");
    group.sample_size(20);
    for (name, exec) in EXECUTIONS {
        let cfg = config(exec);
        group.bench_function(BenchmarkId::new(name, "50^3"), |b| {
            b.iter(|| run_msc_dbscan(black_box(&t), 0.001, &cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.measurement_time(Duration::from_secs(20));
    for (name, exec) in EXECUTIONS {
        let cfg = SweepConfig {
            gammas: vec![60.0, 80.0],
            runs: 4,
            epsilon: 0.001,
            base_seed: 0,
            msc: config(exec),
            timing: false,
        };
        group.bench_function(BenchmarkId::new(name, "2x4"), |b| b.iter(|| run_sweep(&cfg, exec)));
    }
    group.finish();
}

criterion_group!(benches, bench_spectra, bench_pipeline, bench_sweep);
criterion_main!(benches);
