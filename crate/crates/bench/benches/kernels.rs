//! Hot-path benchmarks: transforms, the explicit residual assembly and the
//! full IMEX step, at the working resolutions.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use tflow_bench::bench_state;
use tflow_core::integrator::{Simulation, StepperConfig};
use tflow_core::observables::total_energy;

fn bench_transforms(c: &mut Criterion) {
    let mut group = c.benchmark_group("fft2");
    for n in [64usize, 128] {
        let (grid, _, state) = bench_state(n, 1);
        let phys = state.temperature().physical_data().into_owned();
        let spec = state.temperature().spectral().unwrap().clone();
        group.bench_with_input(BenchmarkId::new("forward", n), &n, |b, _| {
            b.iter(|| black_box(grid.forward(black_box(&phys))))
        });
        group.bench_with_input(BenchmarkId::new("inverse", n), &n, |b, _| {
            b.iter(|| black_box(grid.inverse(black_box(&spec))))
        });
        group.bench_with_input(BenchmarkId::new("gradient_physical", n), &n, |b, _| {
            b.iter(|| black_box(grid.gradient_physical(black_box(&spec))))
        });
    }
    group.finish();
}

fn bench_stepper(c: &mut Criterion) {
    let mut group = c.benchmark_group("stepper");
    group.sample_size(20);
    for n in [64usize, 128] {
        let (grid, laws, state) = bench_state(n, 2);
        let sim = Simulation::new(grid, laws, StepperConfig::new(1e-3)).unwrap();
        group.bench_with_input(BenchmarkId::new("explicit_rhs", n), &n, |b, _| {
            b.iter(|| black_box(sim.explicit_rhs(black_box(&state)).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("step", n), &n, |b, _| {
            b.iter(|| black_box(sim.step(black_box(&state)).unwrap()))
        });
    }
    group.finish();
}

fn bench_observables(c: &mut Criterion) {
    let (_, laws, state) = bench_state(64, 3);
    c.bench_function("total_energy/64", |b| {
        b.iter(|| black_box(total_energy(black_box(&state), &laws)))
    });
}

criterion_group!(benches, bench_transforms, bench_stepper, bench_observables);
criterion_main!(benches);
