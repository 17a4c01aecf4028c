use std::hint::black_box;

use contextlab::bounds::{phase_bound_with, sample_noncontextual_with, AscentConfig, DEFAULT_GRADIENT_TOL};
use contextlab::catalog::{parity_pseudospin_triple, weyl_triple};
use contextlab::par::Execution;
use contextlab::pms::{build_square, scan_states_with};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn scans(c: &mut Criterion) {
    let mut group = c.benchmark_group("scan_states");
    group.sample_size(10);
    for (name, triple) in [("weyl4", weyl_triple(4).unwrap()), ("parity8", parity_pseudospin_triple(8).unwrap())] {
        let square = build_square(&triple);
        for (mode, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(mode, name), &exec, |b, &exec| {
                b.iter(|| scan_states_with(black_box(&square), 50, 20, 1, exec))
            });
        }
    }
    group.finish();
}

fn bounds(c: &mut Criterion) {
    let mut group = c.benchmark_group("phase_bound");
    group.sample_size(10);
    for (mode, exec) in MODES {
        let cfg = AscentConfig {
            execution: exec,
            ..AscentConfig::default()
        };
        group.bench_function(BenchmarkId::new(mode, "64 starts"), |b| {
            b.iter(|| phase_bound_with(64, DEFAULT_GRADIENT_TOL, black_box(3), &cfg).unwrap())
        });
        group.bench_function(BenchmarkId::new(mode, "1e5 samples"), |b| {
            b.iter(|| sample_noncontextual_with(100_000, black_box(3), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, scans, bounds);
criterion_main!(benches);
