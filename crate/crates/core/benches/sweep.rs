use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use phasetrop::harness::{run_suite_with, sample_line, Exec, Strategy, SuiteOptions};
use phasetrop::{psi_t, IsotopyParams};

const MODES: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn deform_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("psi_t sweep");
    for n in [20, 60] {
        let samples = sample_line(Strategy::CoamoebaGrid, n, 7).unwrap();
        let params = IsotopyParams::at(0.5);
        for (label, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(label, samples.len()), &samples.points, |b, pts| {
                b.iter(|| exec.map(pts, |p| psi_t(black_box(p), &params).ok()))
            });
        }
    }
    group.finish();
}

fn suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_suite");
    group.sample_size(10);
    let samples = sample_line(Strategy::CoamoebaGrid, 30, 7)
        .unwrap()
        .union(&sample_line(Strategy::SeamCurves, 30, 7).unwrap());
    let params = IsotopyParams::default();
    let t_grid = [0.0, 0.5, 1.0];
    for (label, exec) in MODES {
        let opts = SuiteOptions { exec, ..SuiteOptions::default() };
        group.bench_function(label, |b| b.iter(|| run_suite_with(black_box(&samples), &params, &t_grid, &opts)));
    }
    group.finish();
}

criterion_group!(benches, deform_sweep, suite);
criterion_main!(benches);
